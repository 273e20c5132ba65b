#include "stmc/weakform.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "stmc/csv.hpp"

namespace stmc {

namespace {

double sample_mean(const std::vector<ResidualSample>& samples, double (*pick)(const ResidualSample&)) {
    double m = 0.0;
    for (const auto& s : samples) m += pick(s);
    return m / static_cast<double>(samples.size());
}

double sample_se(const std::vector<ResidualSample>& samples, double (*pick)(const ResidualSample&)) {
    const double m = sample_mean(samples, pick);
    double var = 0.0;
    for (const auto& s : samples) {
        const double d = pick(s) - m;
        var += d * d;
    }
    var /= static_cast<double>(samples.size() - 1);
    return std::sqrt(var / static_cast<double>(samples.size()));
}

double pick_residual(const ResidualSample& s) { return s.residual; }
double pick_ablated(const ResidualSample& s) { return s.residual + s.laplacian_term; }

}  // namespace

double ResidualReport::mean() const {
    if (samples.empty()) throw std::invalid_argument("ResidualReport: empty");
    return sample_mean(samples, pick_residual);
}

double ResidualReport::std_error() const {
    if (samples.size() < 2) throw std::invalid_argument("ResidualReport: needs at least two samples");
    return sample_se(samples, pick_residual);
}

double ResidualReport::mean_without_laplacian() const {
    if (samples.empty()) throw std::invalid_argument("ResidualReport: empty");
    return sample_mean(samples, pick_ablated);
}

double ResidualReport::std_error_without_laplacian() const {
    if (samples.size() < 2) throw std::invalid_argument("ResidualReport: needs at least two samples");
    return sample_se(samples, pick_ablated);
}

void ResidualReport::write_csv(std::ostream& out) const {
    out << "path_index,t,residual,drift_term,martingale_term,laplacian_term\n";
    for (const auto& s : samples)
        csv_row(out, {csv_cell(s.path_index), csv_cell(s.t), csv_cell(s.residual),
                      csv_cell(s.drift_term), csv_cell(s.martingale_term),
                      csv_cell(s.laplacian_term)});
}

ResidualSample ito_residual(const PathSolution& sol, const Drift& b, const TestFunction& phi,
                            double t, std::size_t path_index) {
    const UniformGrid& grid = sol.grid();
    const BrownianPath& path = sol.path();
    if (b.dim() != grid.dim() || phi.dim() != grid.dim())
        throw std::invalid_argument("ito_residual: dimension mismatch");
    if (!phi.supported_in(grid.box()))
        throw std::invalid_argument("ito_residual: phi support escapes the box margin");

    const int m = path.index_of_time(t);
    const double dt = path.dt();
    for (int k = 0; k <= m; ++k)
        if (!sol.has_time(k * dt))
            throw std::invalid_argument("ito_residual: sol must hold every grid time up to t");

    // Everything phi-dependent is supported on finitely many nodes; collect
    // them once.  The margin check above keeps them interior.
    struct Node {
        std::size_t flat;
        double phi;
        Vec grad_phi;
        double lap_phi;
        Vec velocity;
    };
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Vec x = grid.node(i);
        const double v = phi.value(x);
        if (v == 0.0) continue;
        if (!grid.is_interior(i))
            throw std::invalid_argument("ito_residual: phi support touches the boundary");
        nodes.push_back({i, v, phi.gradient(x), phi.laplacian(x), b.eval(x)});
    }
    const double w = grid.cell_volume();

    auto pair_with_phi = [&](const GridFunction& u) {
        double acc = 0.0;
        for (const Node& n : nodes) acc += u.value(n.flat) * n.phi;
        return acc * w;
    };

    ResidualSample out;
    out.path_index = path_index;
    out.t = t;

    for (int k = 0; k < m; ++k) {
        const GridFunction& u = sol.at_time(k * dt);

        double drift_q = 0.0, lap_q = 0.0;
        Vec mart_q(grid.dim());
        for (const Node& n : nodes) {
            const double uv = u.value(n.flat);
            drift_q += n.velocity.dot(u.gradient(n.flat)) * n.phi;
            lap_q += uv * n.lap_phi;
            for (int a = 0; a < grid.dim(); ++a) mart_q[a] += uv * n.grad_phi[a];
        }
        out.drift_term += dt * w * drift_q;
        out.laplacian_term += 0.5 * dt * w * lap_q;
        out.martingale_term += w * mart_q.dot(path.increment_vec(k));
    }

    const double terminal = pair_with_phi(sol.at_time(t));
    const double initial = pair_with_phi(sol.at_time(0.0));
    out.residual = terminal - initial + out.drift_term - out.martingale_term - out.laplacian_term;
    return out;
}

double duality_pairing(const PathSolution& sol, const Drift& b, const TestFunction& phi,
                       const BrownianPath& path, double t) {
    const UniformGrid& grid = sol.grid();
    if (b.dim() != grid.dim() || phi.dim() != grid.dim())
        throw std::invalid_argument("duality_pairing: dimension mismatch");
    const BrownianPath& own = sol.path();
    if (own.seed != path.seed || own.n_steps != path.n_steps || own.dim != path.dim
        || own.horizon != path.horizon)
        throw std::invalid_argument("duality_pairing: sol was built on a different path");
    path.index_of_time(t);

    double acc = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        const Vec x = grid.node(i);
        const double pv = phi.value(x);
        if (pv == 0.0) continue;
        const Vec flowed = forward_flow(b, path, 0.0, t, x).terminal;
        acc += sol.eval(t, flowed) * pv;
    }
    return acc * grid.cell_volume();
}

}  // namespace stmc
