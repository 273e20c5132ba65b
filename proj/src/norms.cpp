#include "stmc/norms.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "stmc/csv.hpp"
#include "stmc/flow.hpp"
#include "stmc/parallel.hpp"

namespace stmc {

double conjugate_exponent(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("conjugate_exponent: p must exceed 1");
    return p / (p - 1.0);
}

double lp_norm(const GridFunction& f, double p, bool gaussian_weight) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be at least 1");
    const UniformGrid& grid = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        double term = std::pow(std::fabs(f.value(i)), p);
        if (gaussian_weight) term *= std::exp(-grid.node(i).norm_sq());
        acc += term;
    }
    return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

double weighted_sobolev_seminorm(const GridFunction& f, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("weighted_sobolev_seminorm: p must be at least 1");
    const UniformGrid& grid = f.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        if (!grid.is_interior(i)) continue;
        acc += std::pow(f.gradient(i).norm(), p) * std::exp(-grid.node(i).norm_sq());
    }
    return std::pow(acc * grid.cell_volume(), 1.0 / p);
}

double grid_holder_seminorm(const GridFunction& f, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("grid_holder_seminorm: theta must lie in (0,1]");
    const UniformGrid& grid = f.grid();
    const int d = grid.dim();
    const int n_axis = grid.nodes_per_axis();
    const int window = static_cast<int>(std::ceil(1.0 / grid.h()));

    double sup = 0.0;
    int base_idx[kMaxDim] = {0, 0, 0};
    for (std::size_t i = 0; i < grid.node_count(); ++i) {
        {
            std::size_t rem = i;
            for (int a = d - 1; a >= 0; --a) {
                base_idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n_axis));
                rem /= static_cast<std::size_t>(n_axis);
            }
        }
        const Vec xi = grid.node(i);
        int off[kMaxDim] = {0, 0, 0};
        int lo[kMaxDim], hi[kMaxDim];
        for (int a = 0; a < d; ++a) {
            lo[a] = std::max(-window, -base_idx[a]);
            hi[a] = std::min(window, n_axis - 1 - base_idx[a]);
            off[a] = lo[a];
        }
        while (true) {
            std::size_t j = 0;
            for (int a = 0; a < d; ++a)
                j = j * static_cast<std::size_t>(n_axis)
                  + static_cast<std::size_t>(base_idx[a] + off[a]);
            if (j > i) {
                const double dist = (grid.node(j) - xi).norm();
                if (dist > 0.0 && dist <= 1.0)
                    sup = std::max(sup, std::fabs(f.value(j) - f.value(i)) / std::pow(dist, theta));
            }
            int a = 0;
            while (a < d && ++off[a] > hi[a]) {
                off[a] = lo[a];
                ++a;
            }
            if (a == d) break;
        }
    }
    return sup;
}

void MomentTable::write_csv(std::ostream& out) const {
    out << "sequence_index,epsilon,statistic,value,std_error,n_paths,grid_id\n";
    for (const MomentRow& r : rows)
        csv_row(out, {csv_cell(r.sequence_index), csv_cell(r.epsilon), r.statistic,
                      csv_cell(r.value), csv_cell(r.std_error), csv_cell(r.n_paths), r.grid_id});
}

const MomentRow& MomentTable::find(int sequence_index, const std::string& statistic) const {
    for (const MomentRow& r : rows)
        if (r.sequence_index == sequence_index && r.statistic == statistic) return r;
    throw std::invalid_argument("MomentTable: no such row");
}

namespace {

struct PathExtrema {
    double jac_gap = 0.0;    // sup_t |Dphi_n - Dphi|_F
    double state_gap = 0.0;  // sup_t |phi_n - phi|
    double jac_norm = 0.0;   // sup_t |Dphi_n|_F
};

// One coupled run of the member flow and the reference flow from (s, x) to
// the horizon on a common path, tracking running suprema.
PathExtrema coupled_sweep(const Drift& member, const Drift& reference, const BrownianPath& path,
                          int start_index, const Vec& x) {
    const double dt = path.dt();
    Vec xn = x, xr = x;
    Mat jn = Mat::identity(path.dim), jr = jn;

    PathExtrema ex;
    ex.jac_norm = jn.frobenius();
    for (int k = start_index; k < path.n_steps; ++k) {
        const Mat dbn = member.jacobian(xn);
        const Mat dbr = reference.jacobian(xr);
        jn = (Mat::identity(path.dim) + dt * dbn) * jn;
        jr = (Mat::identity(path.dim) + dt * dbr) * jr;
        xn += dt * member.eval(xn);
        xr += dt * reference.eval(xr);
        const Vec inc = path.increment_vec(k);
        xn += inc;
        xr += inc;

        ex.jac_gap = std::max(ex.jac_gap, (jn - jr).frobenius());
        ex.state_gap = std::max(ex.state_gap, (xn - xr).norm());
        ex.jac_norm = std::max(ex.jac_norm, jn.frobenius());
    }
    return ex;
}

}  // namespace

MomentTable flow_moment_estimates(const Drift& b, std::span<const Drift> approx_sequence, double p,
                                  std::span<const Vec> points, std::span<const double> s_times,
                                  double horizon, int n_steps, int n_paths, std::uint64_t seed) {
    if (approx_sequence.empty())
        throw std::invalid_argument("flow_moment_estimates: empty approximating sequence");
    if (points.empty() || s_times.empty())
        throw std::invalid_argument("flow_moment_estimates: needs start points and start times");
    if (n_paths < 2) throw std::invalid_argument("flow_moment_estimates: needs at least two paths");
    if (!(p >= 1.0)) throw std::invalid_argument("flow_moment_estimates: p must be at least 1");
    for (const Drift& member : approx_sequence) {
        if (!member.smooth())
            throw std::invalid_argument("flow_moment_estimates: sequence members must be smooth");
        if (member.dim() != b.dim())
            throw std::invalid_argument("flow_moment_estimates: dimension mismatch in sequence");
    }
    for (const Vec& x : points)
        if (x.dim() != b.dim())
            throw std::invalid_argument("flow_moment_estimates: start point dimension mismatch");

    // The finest member stands in for the limit flow.
    const Drift& reference = approx_sequence.back();

    std::vector<BrownianPath> paths;
    paths.reserve(static_cast<std::size_t>(n_paths));
    for (int j = 0; j < n_paths; ++j)
        paths.push_back(sample_path(substream_seed(seed, static_cast<std::uint64_t>(j)),
                                    horizon, n_steps, b.dim()));

    std::vector<int> start_indices;
    start_indices.reserve(s_times.size());
    for (double s : s_times) start_indices.push_back(paths.front().index_of_time(s));

    std::string grid_id = "x" + std::to_string(points.size()) + "_s" + std::to_string(s_times.size())
                        + "_T" + csv_cell(horizon) + "_steps" + std::to_string(n_steps);

    MomentTable table;
    for (std::size_t m = 0; m < approx_sequence.size(); ++m) {
        const Drift& member = approx_sequence[m];

        struct Stat {
            double mean = 0.0, se = 0.0;
        };
        Stat best_a, best_b, best_c;
        bool first = true;

        for (const Vec& x : points) {
            const double weight = 1.0 / std::pow(1.0 + x.norm(), p);
            for (int si : start_indices) {
                std::vector<PathExtrema> per_path(paths.size());
                parallel_for(paths.size(), [&](std::size_t j) {
                    with_path_index(static_cast<int>(j), [&] {
                        per_path[j] = coupled_sweep(member, reference, paths[j], si, x);
                    });
                });

                auto mean_se = [&](auto&& extract) {
                    double mean = 0.0;
                    for (const auto& ex : per_path) mean += extract(ex);
                    mean /= static_cast<double>(per_path.size());
                    double var = 0.0;
                    for (const auto& ex : per_path) {
                        const double d = extract(ex) - mean;
                        var += d * d;
                    }
                    var /= static_cast<double>(per_path.size() - 1);
                    return Stat{mean, std::sqrt(var / static_cast<double>(per_path.size()))};
                };

                const Stat a = mean_se([&](const PathExtrema& ex) { return std::pow(ex.jac_gap, p); });
                const Stat sb = mean_se(
                    [&](const PathExtrema& ex) { return std::pow(ex.state_gap, p) * weight; });
                const Stat c = mean_se([&](const PathExtrema& ex) { return std::pow(ex.jac_norm, p); });

                if (first || a.mean > best_a.mean) best_a = a;
                if (first || sb.mean > best_b.mean) best_b = sb;
                if (first || c.mean > best_c.mean) best_c = c;
                first = false;
            }
        }

        const double eps = member.mollification_width();
        const int idx = static_cast<int>(m) + 1;  // records are 1-based
        table.rows.push_back({idx, eps, "jacobian_gap", best_a.mean, best_a.se, n_paths, grid_id});
        table.rows.push_back({idx, eps, "state_gap", best_b.mean, best_b.se, n_paths, grid_id});
        table.rows.push_back({idx, eps, "jacobian_moment", best_c.mean, best_c.se, n_paths, grid_id});
    }
    return table;
}

}  // namespace stmc
