#include "stmc/stability.hpp"

#include <cmath>
#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "stmc/csv.hpp"
#include "stmc/parallel.hpp"

namespace stmc {

namespace {

std::vector<double> output_times(double horizon, int n_output_times) {
    std::vector<double> times(static_cast<std::size_t>(n_output_times));
    for (int j = 1; j <= n_output_times; ++j) {
        times[static_cast<std::size_t>(j - 1)] = horizon * j / n_output_times;
    }
    return times;
}

void check_time_grid(double horizon, int n_output_times, int n_steps, int n_paths) {
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    if (n_output_times < 1) throw std::invalid_argument("n_output_times must be positive");
    if (n_steps < n_output_times || n_steps % n_output_times != 0) {
        throw std::invalid_argument("n_steps must be a positive multiple of n_output_times");
    }
    if (n_paths < 2) throw std::invalid_argument("n_paths must be at least 2");
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

// Mean and standard error, accumulated in ascending path order so results do
// not depend on how paths were distributed over threads.
MeanSe mean_se(const std::vector<double>& samples) {
    const auto n = static_cast<double>(samples.size());
    double sum = 0.0;
    for (double v : samples) sum += v;
    const double mean = sum / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n * (n - 1.0)))};
}

}  // namespace

void write_stability_csv(std::ostream& out, std::span<const StabilityRecord> records) {
    csv_row(out, {"n", "epsilon", "input_distance", "solution_distance", "solution_distance_se",
                  "ratio"});
    for (const auto& r : records) {
        csv_row(out, {csv_cell(r.n), csv_cell(r.epsilon), csv_cell(r.input_distance),
                      csv_cell(r.solution_distance), csv_cell(r.solution_distance_se),
                      csv_cell(r.ratio)});
    }
}

std::vector<StabilityRecord> initial_data_stability(
    const Drift& b, const InitialData& u0, std::span<const InitialData> u0_sequence,
    std::span<const double> labels, double p, const UniformGrid& grid, int n_output_times,
    double horizon, int n_steps, int n_paths, std::uint64_t seed) {
    check_time_grid(horizon, n_output_times, n_steps, n_paths);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    if (u0_sequence.empty()) throw std::invalid_argument("u0_sequence must not be empty");
    if (!labels.empty() && labels.size() != u0_sequence.size()) {
        throw std::invalid_argument("labels must match u0_sequence in length");
    }
    if (b.dim() != grid.dim() || u0.dim != grid.dim()) {
        throw std::invalid_argument("dimension mismatch between drift, data and grid");
    }
    for (const auto& member : u0_sequence) {
        if (member.dim != grid.dim()) {
            throw std::invalid_argument("dimension mismatch between drift, data and grid");
        }
    }

    const std::size_t n_members = u0_sequence.size();
    const double power = 2.0 * p;
    const auto times = output_times(horizon, n_output_times);
    const double weight = (horizon / n_output_times) * grid.cell_volume();

    // Input side: the fixed-data distance the ratio is taken against.
    std::vector<double> input(n_members, 0.0);
    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
        const Vec x = grid.node(flat);
        const double base = u0.f(x);
        for (std::size_t m = 0; m < n_members; ++m) {
            input[m] += std::pow(std::abs(u0_sequence[m].f(x) - base), power);
        }
    }
    for (double& v : input) v *= grid.cell_volume();

    // Solution side: every member rides the same backward endpoints, so the
    // per-point differences are differences of initial data at a shared point.
    std::vector<std::vector<double>> per_path(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t k) {
        with_path_index(static_cast<int>(k), [&] {
            const BrownianPath path =
                sample_path(substream_seed(seed, k), horizon, n_steps, b.dim());
            std::vector<double> totals(n_members, 0.0);
            for (double t : times) {
                for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
                    const Vec y = backward_flow(b, path, 0.0, t, grid.node(flat)).terminal;
                    const double base = u0.f(y);
                    for (std::size_t m = 0; m < n_members; ++m) {
                        totals[m] += std::pow(std::abs(u0_sequence[m].f(y) - base), power);
                    }
                }
            }
            for (double& v : totals) v *= weight;
            per_path[k] = std::move(totals);
        });
    });

    std::vector<StabilityRecord> records(n_members);
    std::vector<double> samples(static_cast<std::size_t>(n_paths));
    for (std::size_t m = 0; m < n_members; ++m) {
        for (std::size_t k = 0; k < per_path.size(); ++k) samples[k] = per_path[k][m];
        const MeanSe stat = mean_se(samples);
        auto& r = records[m];
        r.n = static_cast<int>(m) + 1;
        r.epsilon = labels.empty() ? 0.0 : labels[m];
        r.input_distance = input[m];
        r.solution_distance = stat.mean;
        r.solution_distance_se = stat.se;
        r.ratio = input[m] > 0.0 ? stat.mean / input[m] : 0.0;
    }
    return records;
}

std::vector<StabilityRecord> drift_stability(
    const Drift& b, const Drift& reference, std::span<const Drift> sequence,
    const InitialData& u0, double p, const UniformGrid& grid, int n_output_times,
    double horizon, int n_steps, int n_paths, std::uint64_t seed,
    const Box& holder_box, double holder_step) {
    check_time_grid(horizon, n_output_times, n_steps, n_paths);
    if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
    if (sequence.empty()) throw std::invalid_argument("drift sequence must not be empty");
    if (b.dim() != grid.dim() || reference.dim() != grid.dim() || u0.dim != grid.dim()) {
        throw std::invalid_argument("dimension mismatch between drift, data and grid");
    }
    for (const auto& member : sequence) {
        if (member.dim() != grid.dim()) {
            throw std::invalid_argument("dimension mismatch between drift, data and grid");
        }
    }

    const std::size_t n_members = sequence.size();
    const auto times = output_times(horizon, n_output_times);
    const double weight = (horizon / n_output_times) * grid.cell_volume();

    std::vector<double> input(n_members, 0.0);
    for (std::size_t m = 0; m < n_members; ++m) {
        input[m] = holder_norm_estimate(drift_difference(sequence[m], b), b.dim(), holder_box,
                                        holder_step, b.theta())
                       .total();
    }

    std::vector<std::vector<double>> per_path(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t k) {
        with_path_index(static_cast<int>(k), [&] {
            const BrownianPath path =
                sample_path(substream_seed(seed, k), horizon, n_steps, b.dim());
            const PathSolution ref = solve_characteristics(reference, u0, path, times, grid);
            std::vector<double> totals(n_members, 0.0);
            for (std::size_t m = 0; m < n_members; ++m) {
                const PathSolution sol = solve_characteristics(sequence[m], u0, path, times, grid);
                double acc = 0.0;
                for (std::size_t i = 0; i < times.size(); ++i) {
                    std::vector<double> diff(grid.node_count());
                    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
                        diff[flat] = sol.field(i).value(flat) - ref.field(i).value(flat);
                    }
                    const GridFunction delta(grid, std::move(diff));
                    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
                        if (!grid.is_interior(flat)) continue;
                        const Vec x = grid.node(flat);
                        const double w = std::exp(-x.norm_sq());
                        acc += w * (std::pow(std::abs(delta.value(flat)), p) +
                                    std::pow(delta.gradient(flat).norm(), p));
                    }
                }
                totals[m] = acc * weight;
            }
            per_path[k] = std::move(totals);
        });
    });

    std::vector<StabilityRecord> records(n_members);
    std::vector<double> samples(static_cast<std::size_t>(n_paths));
    for (std::size_t m = 0; m < n_members; ++m) {
        for (std::size_t k = 0; k < per_path.size(); ++k) samples[k] = per_path[k][m];
        const MeanSe stat = mean_se(samples);
        auto& r = records[m];
        r.n = static_cast<int>(m) + 1;
        r.epsilon = sequence[m].mollification_width();
        r.input_distance = input[m];
        // Root of the mean with a delta-method standard error, so records in
        // the same units as the norm being estimated.
        r.solution_distance = std::pow(stat.mean, 1.0 / p);
        r.solution_distance_se =
            stat.mean > 0.0 ? stat.se * std::pow(stat.mean, 1.0 / p - 1.0) / p : 0.0;
        r.ratio = input[m] > 0.0 ? r.solution_distance / input[m] : 0.0;
    }
    return records;
}

double RegularizationReport::deterministic_growth() const {
    if (deterministic.empty() || !(deterministic.front() > 0.0)) {
        throw std::logic_error("initial data has zero Holder seminorm on the grid");
    }
    return deterministic.back() / deterministic.front();
}

double RegularizationReport::stochastic_growth() const {
    if (stochastic_mean.empty() || !(stochastic_mean.front() > 0.0)) {
        throw std::logic_error("initial data has zero Holder seminorm on the grid");
    }
    return stochastic_mean.back() / stochastic_mean.front();
}

void RegularizationReport::write_csv(std::ostream& out) const {
    csv_row(out, {"time", "deterministic", "stochastic_mean", "stochastic_se"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        csv_row(out, {csv_cell(times[i]), csv_cell(deterministic[i]),
                      csv_cell(stochastic_mean[i]), csv_cell(stochastic_se[i])});
    }
}

RegularizationReport regularization_demo(const Drift& b, const InitialData& u0, double theta_prime,
                                         const UniformGrid& grid, int n_output_times,
                                         double horizon, int n_steps, int n_paths,
                                         std::uint64_t seed) {
    check_time_grid(horizon, n_output_times, n_steps, n_paths);
    if (!(theta_prime > 0.0) || !(theta_prime <= 1.0)) {
        throw std::invalid_argument("theta_prime must lie in (0, 1]");
    }
    if (b.dim() != grid.dim() || u0.dim != grid.dim()) {
        throw std::invalid_argument("dimension mismatch between drift, data and grid");
    }

    std::vector<double> times{0.0};
    for (double t : output_times(horizon, n_output_times)) times.push_back(t);
    const std::size_t n_times = times.size();

    RegularizationReport report;
    report.theta_prime = theta_prime;
    report.times = times;

    const BrownianPath still = zero_path(horizon, n_steps, b.dim());
    const PathSolution frozen = solve_characteristics(b, u0, still, times, grid);
    report.deterministic.resize(n_times);
    for (std::size_t i = 0; i < n_times; ++i) {
        report.deterministic[i] = grid_holder_seminorm(frozen.field(i), theta_prime);
    }

    std::vector<std::vector<double>> per_path(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t k) {
        with_path_index(static_cast<int>(k), [&] {
            const BrownianPath path =
                sample_path(substream_seed(seed, k), horizon, n_steps, b.dim());
            const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
            std::vector<double> rows(n_times);
            for (std::size_t i = 0; i < n_times; ++i) {
                rows[i] = grid_holder_seminorm(sol.field(i), theta_prime);
            }
            per_path[k] = std::move(rows);
        });
    });

    report.stochastic_mean.resize(n_times);
    report.stochastic_se.resize(n_times);
    std::vector<double> samples(static_cast<std::size_t>(n_paths));
    for (std::size_t i = 0; i < n_times; ++i) {
        for (std::size_t k = 0; k < per_path.size(); ++k) samples[k] = per_path[k][i];
        const MeanSe stat = mean_se(samples);
        report.stochastic_mean[i] = stat.mean;
        report.stochastic_se[i] = stat.se;
    }
    return report;
}

}  // namespace stmc
