// Acceptance gates for the pathwise transport engine.
//
// Each criterion prints one PASS/FAIL line with its measured numbers; the
// exit code is the number of failed criteria.  Every threshold is pinned in
// `Gates` below and every fixture constant is pinned at its use site; both
// are regression bounds, not tunables.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "stmc/experiment.hpp"
#include "stmc/stability.hpp"
#include "stmc/weakform.hpp"

using namespace stmc;

namespace {

struct Gates {
    // 1: exact translation under zero drift.
    double translation_tol = 1e-12;
    double translation_budget_seconds = 10.0;
    // 2: strong convergence order of the noisy Euler flow on a linear field.
    double strong_order_min = 0.9;
    // 3: inverse-flow gap halving band per step halving.
    double halving_lo = 1.6;
    double halving_hi = 2.4;
    // 4: weak-form residual band and the second-derivative ablation.
    double residual_se_mult = 3.0;
    double ablation_factor = 5.0;
    int ablation_quorum = 4;
    // 5: duality gap decay from the coarsest to the finest level.
    double duality_decay = 0.6;
    // 7/9: flat-band factors for ratio and moment stability.
    double ratio_band = 3.0;
    double moment_band = 3.0;
    double se_mult = 2.0;
    // 10: seminorm growth separation between silent and noisy dynamics.
    double det_growth_min = 10.0;
    double stoch_growth_max = 3.0;
};

constexpr Gates kGates;

int g_failures = 0;

std::string str(const char* fmt, ...) {
    va_list ap;
    va_start(ap, fmt);
    char buf[512];
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

void report(int index, const char* name, bool pass, const std::string& detail) {
    std::printf("criterion %2d  %-46s %s  (%s)\n", index, name, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

Drift::RoughParams ladder_params() {
    Drift::RoughParams p;
    p.theta = 0.35;
    p.amplitude = 1.0;
    p.ladder_size = 5;
    p.tail_slope = -0.4;
    p.phase_seed = 7;
    return p;
}

Drift mollified_ladder_drift() { return mollify(Drift::rough(1, ladder_params()), 0.1); }

std::vector<double> dense_times(double horizon, int n_steps) {
    std::vector<double> times;
    for (int k = 0; k <= n_steps; ++k) times.push_back(horizon * k / n_steps);
    return times;
}

// --- 1: zero drift makes the solver an exact translation of u0 ---

void criterion_translation() {
    const auto t0 = std::chrono::steady_clock::now();
    double max_gap = 0.0;
    for (const int dim : {1, 2}) {
        const Drift b = Drift::zero(dim);
        const InitialData u0 = gaussian_bump(dim, Vec(dim), 0.8);
        const UniformGrid grid(Box{dim, 3.0}, dim == 1 ? 0.05 : 0.1);
        const BrownianPath path = sample_path(dim == 1 ? 101 : 102, 1.0, 64, dim);
        const std::vector<double> times{0.5, 1.0};
        const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
        for (const double t : times) {
            const Vec shift = path.cumulative(path.index_of_time(t));
            const GridFunction& field = sol.at_time(t);
            for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
                Vec y = grid.node(flat);
                for (int a = 0; a < dim; ++a) y[a] -= shift[a];
                max_gap = std::max(max_gap, std::fabs(field.value(flat) - u0.f(y)));
            }
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass =
        max_gap <= kGates.translation_tol && seconds < kGates.translation_budget_seconds;
    report(1, "zero-drift solve is an exact translation", pass,
           str("max gap %.2e, %.1fs", max_gap, seconds));
}

// --- 2: strong order of the Euler flow against the linear-drift recursion ---

void criterion_strong_order() {
    Mat a(1);
    a(0, 0) = -1.0;
    const Drift b = Drift::linear(a);
    const int n_fine = 16384;  // reference resolution 2^-14
    const std::vector<int> factors{256, 128, 64, 32, 16};  // dt 2^-6 .. 2^-10
    const int n_paths = 400;

    std::vector<double> mean_err(factors.size(), 0.0);
    for (int k = 0; k < n_paths; ++k) {
        const BrownianPath fine = sample_path(substream_seed(2029, k), 1.0, n_fine, 1);
        // Integrating-factor recursion on the fine grid: the semigroup is
        // applied exactly, only the noise integral is left-point sampled,
        // so its own error sits far below the coarsest tested level.
        const double decay = std::exp(-fine.dt());
        double x_ref = 1.0;
        for (int s = 0; s < n_fine; ++s) x_ref = decay * x_ref + fine.increment(s, 0);

        for (std::size_t li = 0; li < factors.size(); ++li) {
            const BrownianPath coarse = coarsen(fine, factors[li]);
            const double x_euler = forward_flow(b, coarse, 0.0, 1.0, Vec{1.0}).terminal[0];
            mean_err[li] += std::fabs(x_euler - x_ref);
        }
    }
    for (double& e : mean_err) e /= n_paths;

    double su = 0, sv = 0, suu = 0, suv = 0;
    for (std::size_t li = 0; li < factors.size(); ++li) {
        const double u = std::log(factors[li] / static_cast<double>(n_fine));
        const double v = std::log(mean_err[li]);
        su += u;
        sv += v;
        suu += u * u;
        suv += u * v;
    }
    const double n = static_cast<double>(factors.size());
    const double slope = (suv - su * sv / n) / (suu - su * su / n);
    report(2, "noisy Euler flow converges at strong order 1", slope >= kGates.strong_order_min,
           str("slope %.3f, err %.2e..%.2e", slope, mean_err.front(), mean_err.back()));
}

// --- 3: forward/backward inverse gap halves with the time step ---

void criterion_inverse_halving() {
    const Drift b = mollified_ladder_drift();
    std::vector<Vec> points;
    for (const double x : {-1.5, -0.75, 0.0, 0.75, 1.5}) points.push_back(Vec{x});
    const int n_paths = 16;

    double mean_gap[3] = {0.0, 0.0, 0.0};
    for (int k = 0; k < n_paths; ++k) {
        const BrownianPath fine = sample_path(substream_seed(31, k), 1.0, 256, 1);
        int li = 0;
        for (const int factor : {4, 2, 1}) {
            mean_gap[li++] += inverse_check(b, coarsen(fine, factor), 1.0, points);
        }
    }
    const double r1 = mean_gap[0] / mean_gap[1];
    const double r2 = mean_gap[1] / mean_gap[2];
    const bool pass = r1 >= kGates.halving_lo && r1 <= kGates.halving_hi &&
                      r2 >= kGates.halving_lo && r2 <= kGates.halving_hi;
    report(3, "inverse-flow gap halves with the step", pass, str("ratios %.2f, %.2f", r1, r2));
}

// --- 4: weak-form residual within noise plus fitted bias; ablation breaks it ---

struct ResidualLevel {
    double dt = 0.0;
    double h = 0.0;
    std::vector<double> mean, se, ablated_mean;
};

ResidualLevel residual_level(const Drift& b, const InitialData& u0,
                             const std::vector<TestFunction>& phis, int n_steps, double h,
                             int n_paths, std::uint64_t seed) {
    ResidualLevel level;
    level.dt = 1.0 / n_steps;
    level.h = h;
    const UniformGrid grid(Box{1, 6.0}, h);
    const auto times = dense_times(1.0, n_steps);

    std::vector<ResidualReport> reports(phis.size());
    for (auto& r : reports) r.samples.resize(static_cast<std::size_t>(n_paths));
    for (int k = 0; k < n_paths; ++k) {
        const BrownianPath path = sample_path(substream_seed(seed, k), 1.0, n_steps, 1);
        const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
        for (std::size_t j = 0; j < phis.size(); ++j) {
            reports[j].samples[static_cast<std::size_t>(k)] =
                ito_residual(sol, b, phis[j], 1.0, static_cast<std::size_t>(k));
        }
    }
    for (const auto& r : reports) {
        level.mean.push_back(r.mean());
        level.se.push_back(r.std_error());
        level.ablated_mean.push_back(r.mean_without_laplacian());
    }
    return level;
}

void criterion_weakform() {
    const Drift b = mollified_ladder_drift();
    // Narrow data against wide test functions: the second-derivative pairing
    // is then a single-signed O(1) signal while the quadrature bias constant
    // stays O(1), so the ablation separates cleanly from the fitted bound.
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.35);
    std::vector<TestFunction> phis;
    for (const double c : {-0.6, -0.3, 0.0, 0.3, 0.6}) phis.push_back(TestFunction(Vec{c}, 1.2));
    const int n_paths = 2000;

    // Fit the discretization constant on two coarse levels, then test the
    // fine level against noise plus that bias model.
    const ResidualLevel fit_a = residual_level(b, u0, phis, 16, 0.2, n_paths, 404);
    const ResidualLevel fit_b = residual_level(b, u0, phis, 32, 0.1, n_paths, 404);
    double c_fit = 0.0;
    for (const ResidualLevel* level : {&fit_a, &fit_b}) {
        const double scale = level->dt + level->h * level->h;
        for (const double m : level->mean) c_fit = std::max(c_fit, std::fabs(m) / scale);
    }

    const ResidualLevel test = residual_level(b, u0, phis, 64, 0.05, n_paths, 404);
    const double bias = c_fit * (test.dt + test.h * test.h);
    bool all_within = true;
    int ablation_hits = 0;
    double worst_ratio = 0.0;
    for (std::size_t j = 0; j < phis.size(); ++j) {
        const double bound = kGates.residual_se_mult * test.se[j] + bias;
        worst_ratio = std::max(worst_ratio, std::fabs(test.mean[j]) / bound);
        if (std::fabs(test.mean[j]) > bound) all_within = false;
        if (std::fabs(test.ablated_mean[j]) >= kGates.ablation_factor * bound) ++ablation_hits;
    }
    const bool pass = all_within && ablation_hits >= kGates.ablation_quorum;
    report(4, "weak-form residual within noise plus bias", pass,
           str("C %.3g, worst |mean|/bound %.2f, ablation %d/5", c_fit, worst_ratio,
               ablation_hits));
}

// --- 5: duality pairing self-converges to the u0 integral; zero data exact ---

void criterion_duality() {
    const Drift b = mollified_ladder_drift();
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const TestFunction phi(Vec{0.0}, 0.5);
    const int n_paths = 8;

    const int steps_grid[3] = {16, 32, 64};
    const double h_grid[3] = {0.2, 0.1, 0.05};
    double mean_gap[3] = {0.0, 0.0, 0.0};
    for (int li = 0; li < 3; ++li) {
        const UniformGrid grid(Box{1, 3.0}, h_grid[li]);
        double baseline = 0.0;
        for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
            const Vec x = grid.node(flat);
            baseline += u0.f(x) * phi.value(x);
        }
        baseline *= grid.cell_volume();
        const std::vector<double> times{1.0};
        for (int k = 0; k < n_paths; ++k) {
            const BrownianPath path = sample_path(substream_seed(505, k), 1.0, steps_grid[li], 1);
            const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
            mean_gap[li] += std::fabs(duality_pairing(sol, b, phi, path, 1.0) - baseline);
        }
        mean_gap[li] /= n_paths;
    }

    InitialData null_data;
    null_data.name = "null";
    null_data.dim = 1;
    null_data.f = [](const Vec&) { return 0.0; };
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(506, 1.0, 32, 1);
    const std::vector<double> times{0.5, 1.0};
    const PathSolution null_sol = solve_characteristics(b, null_data, path, times, grid);
    const bool zero_exact = duality_pairing(null_sol, b, phi, path, 0.5) == 0.0 &&
                            duality_pairing(null_sol, b, phi, path, 1.0) == 0.0;

    const bool pass = mean_gap[2] <= kGates.duality_decay * mean_gap[0] && zero_exact;
    report(5, "duality pairing self-converges, zero data exact", pass,
           str("gaps %.2e -> %.2e, zero %s", mean_gap[0], mean_gap[2],
               zero_exact ? "exact" : "NONZERO"));
}

// --- 6: renormalization commutes with solving, bitwise ---

void criterion_renormalization() {
    const Drift b = mollified_ladder_drift();
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(606, 1.0, 32, 1);
    const std::vector<double> times{0.0, 0.5, 1.0};
    const PathSolution sol = solve_characteristics(b, u0, path, times, grid);

    struct BetaCase {
        const char* name;
        double (*fn)(double);
        double lo, hi;
    };
    const BetaCase betas[] = {
        {"square", [](double s) { return s * s; }, 0.0, 1.0},
        {"tanh", [](double s) { return std::tanh(s); }, 0.0, std::tanh(1.0)},
    };

    std::size_t mismatches = 0;
    for (const auto& beta : betas) {
        const PathSolution left = renormalize(sol, beta.fn, beta.name);
        InitialData composed;
        composed.name = std::string(beta.name) + "_u0";
        composed.dim = 1;
        composed.f = [f0 = u0.f, fn = beta.fn](const Vec& x) { return fn(f0(x)); };
        composed.min_value = beta.lo;
        composed.max_value = beta.hi;
        const PathSolution right = solve_characteristics(b, composed, path, times, grid);
        for (std::size_t i = 0; i < times.size(); ++i) {
            for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
                if (left.field(i).value(flat) != right.field(i).value(flat)) ++mismatches;
            }
        }
    }
    report(6, "renormalization commutes with solving, bitwise", mismatches == 0,
           str("%zu mismatched node values", mismatches));
}

// --- 7: data-perturbation ratios sit in one flat band ---

void criterion_data_stability() {
    const Drift b = mollified_ladder_drift();
    const InitialData u0 = cone(1, 1.5);
    // Perturbations of prescribed size 2^-n with grid-resolvable shapes, so
    // the probed constant reflects the dynamics rather than sampling error.
    const double centers[5] = {0.0, 0.5, -0.5, 1.0, -1.0};
    const double widths[5] = {0.8, 0.6, 0.7, 0.5, 0.9};
    std::vector<InitialData> members;
    std::vector<double> labels;
    for (int n = 1; n <= 5; ++n) {
        const double delta = std::ldexp(1.0, -n);
        const InitialData bump = gaussian_bump(1, Vec{centers[n - 1]}, widths[n - 1]);
        InitialData member;
        member.name = "perturbed";
        member.dim = 1;
        member.f = [f0 = u0.f, g = bump.f, delta](const Vec& x) { return f0(x) + delta * g(x); };
        member.min_value = 0.0;
        member.max_value = 1.0 + delta;
        members.push_back(member);
        labels.push_back(delta);
    }
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const auto records =
        initial_data_stability(b, u0, members, labels, 2.0, grid, 4, 0.5, 32, 200, 707);

    double max_lower = 0.0, min_upper = 1e300, lo = 1e300, hi = 0.0;
    for (const auto& r : records) {
        const double se_ratio = r.solution_distance_se / r.input_distance;
        max_lower = std::max(max_lower, r.ratio - kGates.se_mult * se_ratio);
        min_upper = std::min(min_upper, r.ratio + kGates.se_mult * se_ratio);
        lo = std::min(lo, r.ratio);
        hi = std::max(hi, r.ratio);
    }
    const bool pass = max_lower <= kGates.ratio_band * min_upper && lo > 0.0;
    report(7, "data-perturbation ratios sit in a flat band", pass,
           str("ratios %.3f..%.3f, band %.2f <= %.2f", lo, hi, max_lower,
               kGates.ratio_band * min_upper));
}

// --- 8: drift mollification shrinks both input and solution distances ---

void criterion_drift_stability() {
    const Drift b = Drift::rough(1, ladder_params());
    std::vector<Drift> members;
    for (int n = 1; n <= 5; ++n) members.push_back(mollify(b, std::ldexp(1.0, -n)));
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.1);

    const auto records = drift_stability(b, b, members, u0, 2.0, grid, 4, 0.5, 32, 200, 808,
                                         Box{1, 2.0}, 0.05);
    bool inputs_decreasing = true;
    bool distances_monotone = true;
    for (std::size_t n = 0; n + 1 < records.size(); ++n) {
        if (!(records[n + 1].input_distance < records[n].input_distance))
            inputs_decreasing = false;
        const double allowance =
            kGates.se_mult *
            (records[n].solution_distance_se + records[n + 1].solution_distance_se);
        if (records[n + 1].solution_distance > records[n].solution_distance + allowance)
            distances_monotone = false;
    }
    const bool pass = inputs_decreasing && distances_monotone;
    report(8, "drift mollification shrinks both distances", pass,
           str("d %.3g..%.3g, input %.3g..%.3g%s", records.front().solution_distance,
               records.back().solution_distance, records.front().input_distance,
               records.back().input_distance,
               distances_monotone ? "" : ", NON-MONOTONE"));
}

// --- 9: flow gaps shrink along the ladder, moments stay bounded ---

void criterion_flow_moments() {
    Drift::RoughParams p = ladder_params();
    p.amplitude = 0.5;  // keeps the Jacobian moment band inside a factor 3
    const Drift b = Drift::rough(1, p);
    std::vector<Drift> members;
    for (int n = 1; n <= 5; ++n) members.push_back(mollify(b, std::ldexp(1.0, -n)));
    std::vector<Vec> points;
    for (const double x : {-1.5, -0.75, 0.0, 0.75, 1.5}) points.push_back(Vec{x});
    const std::vector<double> s_times{0.0, 0.25, 0.5, 0.75};

    const MomentTable table =
        flow_moment_estimates(b, members, 2.0, points, s_times, 1.0, 64, 200, 909);

    bool gaps_ok = true;
    double tail_gap = 0.0;
    for (const char* stat : {"jacobian_gap", "state_gap"}) {
        std::vector<double> v, se;
        for (int n = 1; n <= 5; ++n) {
            const MomentRow& row = table.find(n, stat);
            v.push_back(row.value);
            se.push_back(row.std_error);
        }
        // The last member doubles as the reference flow, so its gap must be
        // exactly zero; earlier gaps decrease within sampling error.
        if (v[4] != 0.0) gaps_ok = false;
        if (!(v[3] > 0.0) || !(v[3] < v[0])) gaps_ok = false;
        for (int n = 0; n < 3; ++n) {
            if (v[n + 1] > v[n] + kGates.se_mult * (se[n] + se[n + 1])) gaps_ok = false;
        }
        tail_gap = std::max(tail_gap, v[3]);
    }

    double moment_lo = 1e300, moment_hi = 0.0;
    for (int n = 1; n <= 5; ++n) {
        const double v = table.find(n, "jacobian_moment").value;
        moment_lo = std::min(moment_lo, v);
        moment_hi = std::max(moment_hi, v);
    }
    const bool moments_ok = moment_hi <= kGates.moment_band * moment_lo;
    report(9, "flow gaps shrink, Jacobian moments bounded", gaps_ok && moments_ok,
           str("last nonzero gap %.3g, moments %.3g..%.3g", tail_gap, moment_lo, moment_hi));
}

// --- 10: noise restrains the seminorm growth the silent flow exhibits ---

void criterion_regularization() {
    Drift::RoughParams p;
    p.theta = 0.35;
    p.amplitude = 0.25;  // calibrated once; frozen with the gates
    p.ladder_size = 6;
    p.tail_slope = -0.5;
    p.phase_seed = 7;
    const Drift b = Drift::rough(1, p);
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.02);

    const RegularizationReport rep = regularization_demo(b, u0, 0.9, grid, 4, 1.0, 256, 100, 1010);
    const double det = rep.deterministic_growth();
    const double stoch = rep.stochastic_growth();
    const bool pass = det >= kGates.det_growth_min && stoch <= kGates.stoch_growth_max;
    report(10, "noise restrains the seminorm steepening", pass,
           str("deterministic x%.2f, stochastic x%.2f", det, stoch));
}

// --- 11: CSV output independent of the worker count ---

void criterion_thread_reproducibility() {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "stmc_acceptance_threads";
    fs::remove_all(base);

    const auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    struct Job {
        const char* experiment;
        std::vector<std::pair<const char*, const char*>> overrides;
    };
    const Job jobs[] = {
        {"weakform", {{"h", "0.2"}, {"n_steps", "16"}, {"n_paths", "32"}, {"seed", "11"}}},
        {"stability-data",
         {{"h", "0.2"}, {"n_steps", "16"}, {"n_output_times", "2"}, {"n_paths", "8"},
          {"n_levels", "3"}, {"seed", "12"}}},
    };

    bool all_equal = true;
    for (const Job& job : jobs) {
        ExperimentConfig cfg = ExperimentConfig::defaults();
        for (const auto& [key, value] : job.overrides) cfg.set(key, value);

        setenv("STMC_THREADS", "1", 1);
        const auto serial = run_experiment(job.experiment, cfg, (base / "serial").string());
        setenv("STMC_THREADS", "4", 1);
        const auto threaded = run_experiment(job.experiment, cfg, (base / "threaded").string());
        unsetenv("STMC_THREADS");

        if (slurp(serial.files[0]) != slurp(threaded.files[0])) all_equal = false;
        if (slurp(serial.files[0]).empty()) all_equal = false;
    }
    fs::remove_all(base);
    report(11, "CSV output independent of the worker count", all_equal,
           all_equal ? "byte-identical at 1 and 4 workers" : "byte mismatch");
}

}  // namespace

int main() {
    std::printf("acceptance: pathwise transport engine\n");
    criterion_translation();
    criterion_strong_order();
    criterion_inverse_halving();
    criterion_weakform();
    criterion_duality();
    criterion_renormalization();
    criterion_data_stability();
    criterion_drift_stability();
    criterion_flow_moments();
    criterion_regularization();
    criterion_thread_reproducibility();
    std::printf("%d of 11 criteria failed\n", g_failures);
    return g_failures;
}
