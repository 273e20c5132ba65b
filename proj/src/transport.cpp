#include "stmc/transport.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace stmc {

PathSolution::PathSolution(Drift b, InitialData u0, BrownianPath path, std::vector<double> times,
                           UniformGrid grid, FlowOptions flow_options)
    : drift_(std::move(b)),
      u0_(std::move(u0)),
      path_(std::move(path)),
      times_(std::move(times)),
      grid_(grid),
      flow_options_(flow_options) {
    if (drift_.dim() != path_.dim || drift_.dim() != grid_.dim() || u0_.dim != drift_.dim())
        throw std::invalid_argument("PathSolution: dimension mismatch");
    if (times_.empty()) throw std::invalid_argument("PathSolution: needs at least one output time");
    for (std::size_t i = 0; i < times_.size(); ++i) {
        path_.index_of_time(times_[i]);  // rejects off-grid times
        if (i > 0 && !(times_[i] > times_[i - 1]))
            throw std::invalid_argument("PathSolution: output times must be strictly increasing");
    }

    fields_.reserve(times_.size());
    for (double t : times_) {
        GridFunction u(grid_);
        for (std::size_t i = 0; i < grid_.node_count(); ++i) {
            const Vec y = backward_flow(drift_, path_, 0.0, t, grid_.node(i), flow_options_).terminal;
            u.value(i) = u0_.f(y);
        }
        fields_.push_back(std::move(u));
    }
}

bool PathSolution::has_time(double t) const {
    for (double s : times_)
        if (std::fabs(s - t) <= 1e-9 * std::max(1.0, path_.horizon)) return true;
    return false;
}

const GridFunction& PathSolution::at_time(double t) const {
    for (std::size_t i = 0; i < times_.size(); ++i)
        if (std::fabs(times_[i] - t) <= 1e-9 * std::max(1.0, path_.horizon)) return fields_[i];
    throw std::invalid_argument("PathSolution: no field stored at the requested time");
}

double PathSolution::eval(double t, const Vec& x) const {
    const Vec y = backward_flow(drift_, path_, 0.0, t, x, flow_options_).terminal;
    return u0_.f(y);
}

PathSolution solve_characteristics(const Drift& b, const InitialData& u0, const BrownianPath& path,
                                   std::span<const double> times, const UniformGrid& grid,
                                   const FlowOptions& flow_options) {
    return PathSolution(b, u0, path, std::vector<double>(times.begin(), times.end()), grid,
                        flow_options);
}

PathSolution renormalize(const PathSolution& sol, const std::function<double(double)>& beta,
                         const std::string& beta_name) {
    PathSolution out = sol;
    const ScalarMap base = sol.u0_.f;
    out.u0_.name = beta_name + "(" + sol.u0_.name + ")";
    out.u0_.f = [beta, base](const Vec& x) { return beta(base(x)); };

    // The range of beta over [min u0, max u0]; beta is monotone or at least
    // continuous on this interval, so sampling it densely is enough for the
    // recorded bounds used by range checks.
    double lo = beta(sol.u0_.min_value), hi = lo;
    for (int i = 0; i <= 256; ++i) {
        const double v = beta(sol.u0_.min_value
                              + (sol.u0_.max_value - sol.u0_.min_value) * i / 256.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.u0_.min_value = lo;
    out.u0_.max_value = hi;

    for (auto& field : out.fields_)
        for (std::size_t i = 0; i < field.values().size(); ++i)
            field.value(i) = beta(field.value(i));
    return out;
}

GridFunction dual_density(const Drift& b, const TestFunction& phi, const BrownianPath& path,
                          double t, const UniformGrid& grid, const FlowOptions& flow_options) {
    if (!b.smooth())
        throw std::invalid_argument("dual_density: smoothness required, mollify the drift first");
    if (b.dim() != path.dim || b.dim() != grid.dim() || phi.dim() != b.dim())
        throw std::invalid_argument("dual_density: dimension mismatch");

    FlowOptions opts = flow_options;
    opts.want_jacobian = true;
    GridFunction v(grid);
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const FlowResult back = backward_flow(b, path, 0.0, t, grid.node(i), opts);
        v.value(i) = back.jacobian_det * phi.value(back.terminal);
    }
    return v;
}

}  // namespace stmc
