#include "stmc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "stmc/brownian.hpp"
#include "stmc/csv.hpp"
#include "stmc/flow.hpp"
#include "stmc/norms.hpp"
#include "stmc/parallel.hpp"
#include "stmc/stability.hpp"
#include "stmc/transport.hpp"
#include "stmc/weakform.hpp"

namespace stmc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool parse_real(const std::string& s, double& out) {
    try {
        std::size_t idx = 0;
        out = std::stod(s, &idx);
        return idx == s.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_int(const std::string& s, int& out) {
    try {
        std::size_t idx = 0;
        const long long v = std::stoll(s, &idx);
        if (idx != s.size() || v < INT_MIN || v > INT_MAX) return false;
        out = static_cast<int>(v);
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

bool parse_uint(const std::string& s, std::uint64_t& out) {
    if (s.empty() || s[0] == '-') return false;
    try {
        std::size_t idx = 0;
        out = std::stoull(s, &idx);
        return idx == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> parts;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    if (parts.empty()) parts.push_back("");
    return parts;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig c;
    c.entries_ = {
        {"dim", "1"},
        {"half_width", "3"},
        {"h", "0.05"},
        {"horizon", "1"},
        {"n_steps", "64"},
        {"n_output_times", "4"},
        {"n_paths", "200"},
        {"seed", "1"},
        {"p", "2"},
        {"theta", "0.35"},
        {"theta_prime", "0.9"},
        {"drift", "rough_mollified"},
        {"drift_constant", "0.7"},
        {"drift_matrix", "-0.5"},
        {"amplitude", "1"},
        {"ladder_size", "5"},
        {"tail_slope", "-0.4"},
        {"phase_seed", "7"},
        {"epsilon", "0.1"},
        {"reference_epsilon", "0.0078125"},
        {"u0", "gaussian"},
        {"u0_center", "0"},
        {"u0_width", "0.8"},
        {"phi_center", "0"},
        {"phi_scale", "0.5"},
        {"n_levels", "5"},
        {"holder_step", "0.1"},
    };
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    ExperimentConfig cfg = defaults();
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_no) +
                                     " must look like key=value");
        }
        cfg.set(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return cfg;
}

void ExperimentConfig::apply_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw std::runtime_error("override must look like key=value: " + assignment);
    }
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    static const ExperimentConfig known = defaults();
    if (known.entries_.find(key) == known.entries_.end()) {
        throw std::invalid_argument("unknown config key: " + key);
    }
    if (entries_.empty()) entries_ = known.entries_;
    entries_[key] = value;
}

const std::string& ExperimentConfig::raw(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw std::invalid_argument("unknown config key: " + key);
    return it->second;
}

int ExperimentConfig::get_int(const std::string& key) const {
    int v = 0;
    if (!parse_int(raw(key), v)) {
        throw std::invalid_argument("config value for " + key + " must be an integer");
    }
    return v;
}

std::uint64_t ExperimentConfig::get_uint(const std::string& key) const {
    std::uint64_t v = 0;
    if (!parse_uint(raw(key), v)) {
        throw std::invalid_argument("config value for " + key + " must be a nonnegative integer");
    }
    return v;
}

double ExperimentConfig::get_real(const std::string& key) const {
    double v = 0.0;
    if (!parse_real(raw(key), v)) {
        throw std::invalid_argument("config value for " + key + " must be a number");
    }
    return v;
}

std::string ExperimentConfig::get_word(const std::string& key) const { return trim(raw(key)); }

std::vector<double> ExperimentConfig::get_reals(const std::string& key, int expect) const {
    const auto parts = split_commas(raw(key));
    std::vector<double> values;
    for (const auto& part : parts) {
        double v = 0.0;
        if (!parse_real(part, v)) {
            throw std::invalid_argument("config value for " + key + " must list numbers");
        }
        values.push_back(v);
    }
    if (values.size() == 1 && expect > 1) {
        values.assign(static_cast<std::size_t>(expect), values[0]);
    }
    if (values.size() != static_cast<std::size_t>(expect)) {
        throw std::invalid_argument(key + " must list " + std::to_string(expect) + " components");
    }
    return values;
}

std::vector<ConfigViolation> ExperimentConfig::validate() const {
    std::vector<ConfigViolation> out;
    const auto bad = [&](const std::string& field, const std::string& message) {
        out.push_back({field, message});
    };

    int dim = 0, n_steps = 0, n_output_times = 0, n_paths = 0, ladder = 0, n_levels = 0;
    double half_width = 0, h = 0, horizon = 0, p = 0, theta = 0, theta_prime = 0;
    double amplitude = 0, epsilon = 0, ref_eps = 0, u0_width = 0, phi_scale = 0, holder_step = 0;
    std::uint64_t u64 = 0;

    const bool dim_ok = parse_int(raw("dim"), dim);
    if (!dim_ok) bad("dim", "value must be an integer");
    else if (dim < 1 || dim > 3) bad("dim", "dim must be 1, 2 or 3");

    if (!parse_real(raw("half_width"), half_width)) bad("half_width", "value must be a number");
    else if (!(half_width > 0)) bad("half_width", "half_width must be positive");
    if (!parse_real(raw("h"), h)) bad("h", "value must be a number");
    else if (!(h > 0)) bad("h", "h must be positive");
    else if (half_width > 0) {
        const double ratio = half_width / h;
        if (std::fabs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio) || ratio < 1.0) {
            bad("h", "half-width / h must be a positive integer");
        }
    }

    if (!parse_real(raw("horizon"), horizon)) bad("horizon", "value must be a number");
    else if (!(horizon > 0)) bad("horizon", "horizon must be positive");

    const bool steps_ok = parse_int(raw("n_steps"), n_steps);
    const bool outs_ok = parse_int(raw("n_output_times"), n_output_times);
    if (!steps_ok) bad("n_steps", "value must be an integer");
    if (!outs_ok) bad("n_output_times", "value must be an integer");
    if (steps_ok && outs_ok &&
        (n_output_times < 1 || n_steps < n_output_times || n_steps % n_output_times != 0)) {
        bad("n_steps", "n_steps must be a positive multiple of n_output_times");
    }

    if (!parse_int(raw("n_paths"), n_paths)) bad("n_paths", "value must be an integer");
    else if (n_paths < 2) bad("n_paths", "n_paths must be at least 2");

    if (!parse_uint(raw("seed"), u64)) bad("seed", "value must be a nonnegative integer");
    if (!parse_uint(raw("phase_seed"), u64)) bad("phase_seed", "value must be a nonnegative integer");

    if (!parse_real(raw("p"), p)) bad("p", "value must be a number");
    else if (!(p > 1)) bad("p", "p must exceed 1");

    if (!parse_real(raw("theta"), theta)) bad("theta", "value must be a number");
    else if (!(theta > 0 && theta < 1)) bad("theta", "theta must lie in (0, 1)");

    if (!parse_real(raw("theta_prime"), theta_prime)) bad("theta_prime", "value must be a number");
    else if (!(theta_prime > 0 && theta_prime <= 1)) {
        bad("theta_prime", "theta_prime must lie in (0, 1]");
    }

    if (!parse_real(raw("amplitude"), amplitude)) bad("amplitude", "value must be a number");
    else if (!(amplitude >= 0)) bad("amplitude", "amplitude must be nonnegative");

    if (!parse_int(raw("ladder_size"), ladder)) bad("ladder_size", "value must be an integer");
    else if (ladder < 1) bad("ladder_size", "ladder_size must be at least 1");

    if (!parse_real(raw("tail_slope"), epsilon)) bad("tail_slope", "value must be a number");

    if (!parse_real(raw("epsilon"), epsilon)) bad("epsilon", "value must be a number");
    else if (!(epsilon > 0)) bad("epsilon", "epsilon must be positive");

    if (!parse_real(raw("reference_epsilon"), ref_eps)) {
        bad("reference_epsilon", "value must be a number");
    } else if (!(ref_eps > 0)) {
        bad("reference_epsilon", "reference_epsilon must be positive");
    }

    if (!parse_int(raw("n_levels"), n_levels)) bad("n_levels", "value must be an integer");
    else if (n_levels < 2) bad("n_levels", "n_levels must be at least 2");

    if (!parse_real(raw("holder_step"), holder_step)) bad("holder_step", "value must be a number");
    else if (!(holder_step > 0)) bad("holder_step", "holder_step must be positive");

    const std::string drift = get_word("drift");
    if (drift != "zero" && drift != "constant" && drift != "linear" && drift != "rough" &&
        drift != "rough_mollified") {
        bad("drift", "unknown drift kind");
    }
    const std::string u0 = get_word("u0");
    if (u0 != "gaussian" && u0 != "plateau" && u0 != "cone") bad("u0", "unknown initial data kind");

    if (!parse_real(raw("u0_width"), u0_width)) bad("u0_width", "value must be a number");
    else if (!(u0_width > 0)) bad("u0_width", "u0_width must be positive");

    if (!parse_real(raw("phi_scale"), phi_scale)) bad("phi_scale", "value must be a number");
    else if (!(phi_scale > 0)) bad("phi_scale", "phi_scale must be positive");

    if (dim_ok && dim >= 1 && dim <= 3) {
        for (const char* key : {"drift_constant", "u0_center", "phi_center"}) {
            try {
                (void)get_reals(key, dim);
            } catch (const std::exception&) {
                bad(key, std::string(key) + " must list dim components");
            }
        }
        try {
            (void)get_reals("drift_matrix", dim * dim);
        } catch (const std::exception&) {
            bad("drift_matrix", "drift_matrix must list dim*dim components");
        }
        if (phi_scale > 0 && half_width > 0) {
            try {
                const auto c = get_reals("phi_center", dim);
                double reach = 0.0;
                for (double ci : c) reach = std::max(reach, std::fabs(ci));
                if (reach + 4.0 * phi_scale > half_width) {
                    bad("phi_scale", "phi support escapes the box margin");
                }
            } catch (const std::exception&) {
                // already reported against phi_center
            }
        }
    }
    return out;
}

std::uint64_t ExperimentConfig::hash() const {
    // FNV-1a over the sorted key=value lines.
    std::uint64_t acc = 14695981039346656037ULL;
    const auto absorb = [&](const std::string& s) {
        for (const char ch : s) {
            acc ^= static_cast<unsigned char>(ch);
            acc *= 1099511628211ULL;
        }
    };
    for (const auto& [key, value] : entries_) {
        absorb(key);
        absorb("=");
        absorb(value);
        absorb("\n");
    }
    return acc;
}

std::string ExperimentConfig::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

UniformGrid grid_from_config(const ExperimentConfig& cfg) {
    return UniformGrid(Box{cfg.get_int("dim"), cfg.get_real("half_width")}, cfg.get_real("h"));
}

namespace {

Drift::RoughParams rough_params_from_config(const ExperimentConfig& cfg) {
    Drift::RoughParams params;
    params.theta = cfg.get_real("theta");
    params.amplitude = cfg.get_real("amplitude");
    params.ladder_size = cfg.get_int("ladder_size");
    params.tail_slope = cfg.get_real("tail_slope");
    params.phase_seed = cfg.get_uint("phase_seed");
    return params;
}

}  // namespace

Drift drift_from_config(const ExperimentConfig& cfg) {
    const int dim = cfg.get_int("dim");
    const std::string kind = cfg.get_word("drift");
    if (kind == "zero") return Drift::zero(dim);
    if (kind == "constant") {
        const auto c = cfg.get_reals("drift_constant", dim);
        Vec v(dim);
        for (int a = 0; a < dim; ++a) v[a] = c[static_cast<std::size_t>(a)];
        return Drift::constant(v);
    }
    if (kind == "linear") {
        const auto m = cfg.get_reals("drift_matrix", dim * dim);
        Mat a(dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) a(r, c) = m[static_cast<std::size_t>(r * dim + c)];
        return Drift::linear(a);
    }
    if (kind == "rough") return Drift::rough(dim, rough_params_from_config(cfg));
    if (kind == "rough_mollified") {
        return mollify(Drift::rough(dim, rough_params_from_config(cfg)), cfg.get_real("epsilon"));
    }
    throw std::invalid_argument("unknown drift kind");
}

InitialData initial_data_from_config(const ExperimentConfig& cfg) {
    const int dim = cfg.get_int("dim");
    const std::string kind = cfg.get_word("u0");
    const double width = cfg.get_real("u0_width");
    if (kind == "gaussian") {
        const auto c = cfg.get_reals("u0_center", dim);
        Vec center(dim);
        for (int a = 0; a < dim; ++a) center[a] = c[static_cast<std::size_t>(a)];
        return gaussian_bump(dim, center, width);
    }
    if (kind == "plateau") return smoothed_indicator(dim, width, 0.5 * width);
    if (kind == "cone") return cone(dim, width);
    throw std::invalid_argument("unknown initial data kind");
}

TestFunction test_function_from_config(const ExperimentConfig& cfg) {
    const int dim = cfg.get_int("dim");
    const auto c = cfg.get_reals("phi_center", dim);
    Vec center(dim);
    for (int a = 0; a < dim; ++a) center[a] = c[static_cast<std::size_t>(a)];
    return TestFunction(center, cfg.get_real("phi_scale"));
}

namespace {

using nlohmann::json;

std::vector<double> output_times(const ExperimentConfig& cfg) {
    const double horizon = cfg.get_real("horizon");
    const int m = cfg.get_int("n_output_times");
    std::vector<double> times;
    for (int j = 1; j <= m; ++j) times.push_back(horizon * j / m);
    return times;
}

// 5^dim lattice with per-axis offsets at 0, +-L/4 and +-L/2.
std::vector<Vec> point_cloud(int dim, double half_width) {
    const double offsets[5] = {-0.5 * half_width, -0.25 * half_width, 0.0, 0.25 * half_width,
                               0.5 * half_width};
    std::vector<Vec> points;
    int idx[kMaxDim] = {0, 0, 0};
    while (true) {
        Vec x(dim);
        for (int a = 0; a < dim; ++a) x[a] = offsets[idx[a]];
        points.push_back(x);
        int a = 0;
        while (a < dim && ++idx[a] == 5) idx[a++] = 0;
        if (a == dim) break;
    }
    return points;
}

std::vector<Drift> mollified_ladder(const ExperimentConfig& cfg) {
    const Drift rough = Drift::rough(cfg.get_int("dim"), rough_params_from_config(cfg));
    std::vector<Drift> members;
    for (int n = 1; n <= cfg.get_int("n_levels"); ++n) {
        members.push_back(mollify(rough, std::ldexp(1.0, -n)));
    }
    return members;
}

json run_flow_check(const ExperimentConfig& cfg, std::ostream& csv) {
    const Drift b = drift_from_config(cfg);
    const double horizon = cfg.get_real("horizon");
    const int n_steps = cfg.get_int("n_steps");
    const auto points = point_cloud(cfg.get_int("dim"), cfg.get_real("half_width"));

    // One path sampled at the finest resolution, then coarsened, so all
    // three resolutions see the same Brownian increments.
    const BrownianPath fine = sample_path(cfg.get_uint("seed"), horizon, 4 * n_steps, b.dim());
    csv_row(csv, {"n_steps", "max_gap"});
    std::vector<double> gaps;
    for (const int factor : {4, 2, 1}) {
        const BrownianPath path = coarsen(fine, factor);
        const double gap =
            with_path_index(0, [&] { return inverse_check(b, path, horizon, points); });
        csv_row(csv, {csv_cell(path.n_steps), csv_cell(gap)});
        gaps.push_back(gap);
    }
    json extras;
    extras["max_gaps"] = gaps;
    extras["halving_ratios"] = {gaps[0] / gaps[1], gaps[1] / gaps[2]};
    return extras;
}

json run_existence(const ExperimentConfig& cfg, std::ostream& csv) {
    const Drift b = drift_from_config(cfg);
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);
    const auto times = output_times(cfg);
    const BrownianPath path = sample_path(cfg.get_uint("seed"), cfg.get_real("horizon"),
                                          cfg.get_int("n_steps"), b.dim());
    const PathSolution sol =
        with_path_index(0, [&] { return solve_characteristics(b, u0, path, times, grid); });

    const int d = grid.dim();
    std::vector<std::string> header{"time"};
    for (int a = 0; a < d; ++a) header.push_back("x" + std::to_string(a));
    header.push_back("value");
    csv_row(csv, header);
    double lo = u0.max_value, hi = u0.min_value;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const GridFunction& field = sol.field(i);
        lo = std::min(lo, field.min_value());
        hi = std::max(hi, field.max_value());
        for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
            std::vector<std::string> cells{csv_cell(times[i])};
            const Vec x = grid.node(flat);
            for (int a = 0; a < d; ++a) cells.push_back(csv_cell(x[a]));
            cells.push_back(csv_cell(field.value(flat)));
            csv_row(csv, cells);
        }
    }
    json extras;
    extras["field_min"] = lo;
    extras["field_max"] = hi;
    extras["u0_min"] = u0.min_value;
    extras["u0_max"] = u0.max_value;
    extras["range_preserved"] = lo >= u0.min_value && hi <= u0.max_value;
    return extras;
}

json run_weakform(const ExperimentConfig& cfg, std::ostream& csv) {
    const Drift b = drift_from_config(cfg);
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);
    const TestFunction phi = test_function_from_config(cfg);
    const double horizon = cfg.get_real("horizon");
    const int n_steps = cfg.get_int("n_steps");
    const int n_paths = cfg.get_int("n_paths");
    const std::uint64_t seed = cfg.get_uint("seed");

    // The residual integrates over every step, so the solution must carry
    // a field per path-grid time.
    std::vector<double> times;
    for (int k = 0; k <= n_steps; ++k) times.push_back(horizon * k / n_steps);

    ResidualReport report;
    report.samples.resize(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t k) {
        with_path_index(static_cast<int>(k), [&] {
            const BrownianPath path =
                sample_path(substream_seed(seed, k), horizon, n_steps, b.dim());
            const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
            report.samples[k] = ito_residual(sol, b, phi, horizon, k);
        });
    });
    report.write_csv(csv);

    json extras;
    extras["mean"] = report.mean();
    extras["std_error"] = report.std_error();
    extras["mean_without_laplacian"] = report.mean_without_laplacian();
    extras["std_error_without_laplacian"] = report.std_error_without_laplacian();
    return extras;
}

json run_duality(const ExperimentConfig& cfg, std::ostream& csv) {
    const Drift b = drift_from_config(cfg);
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);
    const TestFunction phi = test_function_from_config(cfg);
    const double horizon = cfg.get_real("horizon");
    const int n_steps = cfg.get_int("n_steps");
    const int n_paths = cfg.get_int("n_paths");
    const std::uint64_t seed = cfg.get_uint("seed");
    const auto times = output_times(cfg);

    double baseline = 0.0;
    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
        const Vec x = grid.node(flat);
        baseline += u0.f(x) * phi.value(x);
    }
    baseline *= grid.cell_volume();

    std::vector<std::vector<double>> per_path(static_cast<std::size_t>(n_paths));
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t k) {
        with_path_index(static_cast<int>(k), [&] {
            const BrownianPath path =
                sample_path(substream_seed(seed, k), horizon, n_steps, b.dim());
            const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
            std::vector<double> rows;
            for (const double t : times) rows.push_back(duality_pairing(sol, b, phi, path, t));
            per_path[k] = std::move(rows);
        });
    });

    csv_row(csv, {"path_index", "t", "pairing", "baseline"});
    double max_gap = 0.0;
    for (std::size_t k = 0; k < per_path.size(); ++k) {
        for (std::size_t i = 0; i < times.size(); ++i) {
            csv_row(csv, {csv_cell(k), csv_cell(times[i]), csv_cell(per_path[k][i]),
                          csv_cell(baseline)});
            max_gap = std::max(max_gap, std::fabs(per_path[k][i] - baseline));
        }
    }
    json extras;
    extras["baseline"] = baseline;
    extras["max_abs_gap"] = max_gap;
    return extras;
}

json run_stability_data(const ExperimentConfig& cfg, std::ostream& csv) {
    const Drift b = drift_from_config(cfg);
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);

    std::vector<InitialData> members;
    std::vector<double> labels;
    for (int n = 1; n <= cfg.get_int("n_levels"); ++n) {
        const double eps = std::ldexp(1.0, -n);
        members.push_back(mollify_initial_data(u0, eps));
        labels.push_back(eps);
    }
    const auto records = initial_data_stability(
        b, u0, members, labels, cfg.get_real("p"), grid, cfg.get_int("n_output_times"),
        cfg.get_real("horizon"), cfg.get_int("n_steps"), cfg.get_int("n_paths"),
        cfg.get_uint("seed"));
    write_stability_csv(csv, records);

    json extras;
    json ratios = json::array();
    for (const auto& r : records) ratios.push_back(r.ratio);
    extras["ratios"] = ratios;
    return extras;
}

json run_stability_drift(const ExperimentConfig& cfg, std::ostream& csv) {
    const int dim = cfg.get_int("dim");
    const Drift rough = Drift::rough(dim, rough_params_from_config(cfg));
    const Drift reference = mollify(rough, cfg.get_real("reference_epsilon"));
    const auto members = mollified_ladder(cfg);
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);

    const auto records = drift_stability(
        rough, reference, members, u0, cfg.get_real("p"), grid, cfg.get_int("n_output_times"),
        cfg.get_real("horizon"), cfg.get_int("n_steps"), cfg.get_int("n_paths"),
        cfg.get_uint("seed"), grid.box(), cfg.get_real("holder_step"));
    write_stability_csv(csv, records);

    json extras;
    json dist = json::array(), input = json::array();
    for (const auto& r : records) {
        dist.push_back(r.solution_distance);
        input.push_back(r.input_distance);
    }
    extras["solution_distances"] = dist;
    extras["input_distances"] = input;
    return extras;
}

json run_moments(const ExperimentConfig& cfg, std::ostream& csv) {
    const int dim = cfg.get_int("dim");
    const Drift rough = Drift::rough(dim, rough_params_from_config(cfg));
    const auto members = mollified_ladder(cfg);
    const auto points = point_cloud(dim, cfg.get_real("half_width"));
    const double horizon = cfg.get_real("horizon");
    const int m = cfg.get_int("n_output_times");
    std::vector<double> s_times;
    for (int j = 0; j < m; ++j) s_times.push_back(horizon * j / m);

    const MomentTable table =
        flow_moment_estimates(rough, members, cfg.get_real("p"), points, s_times, horizon,
                              cfg.get_int("n_steps"), cfg.get_int("n_paths"), cfg.get_uint("seed"));
    table.write_csv(csv);

    json extras;
    for (const char* stat : {"jacobian_gap", "state_gap", "jacobian_moment"}) {
        json values = json::array();
        for (std::size_t n = 1; n <= members.size(); ++n) {
            values.push_back(table.find(static_cast<int>(n), stat).value);
        }
        extras[stat] = values;
    }
    return extras;
}

json run_regularization(const ExperimentConfig& cfg, std::ostream& csv) {
    const int dim = cfg.get_int("dim");
    const Drift rough = Drift::rough(dim, rough_params_from_config(cfg));
    const InitialData u0 = initial_data_from_config(cfg);
    const UniformGrid grid = grid_from_config(cfg);

    const RegularizationReport report = regularization_demo(
        rough, u0, cfg.get_real("theta_prime"), grid, cfg.get_int("n_output_times"),
        cfg.get_real("horizon"), cfg.get_int("n_steps"), cfg.get_int("n_paths"),
        cfg.get_uint("seed"));
    report.write_csv(csv);

    json extras;
    extras["deterministic_growth"] = report.deterministic_growth();
    extras["stochastic_growth"] = report.stochastic_growth();
    return extras;
}

struct ExperimentDef {
    const char* name;
    const char* summary;
    json (*run)(const ExperimentConfig&, std::ostream&);
};

const ExperimentDef kExperiments[] = {
    {"flow-check", "inverse gap of the forward/backward maps at three coupled resolutions",
     run_flow_check},
    {"existence", "one pathwise solution field at the output times, with range bookkeeping",
     run_existence},
    {"weakform", "Monte Carlo residual of the Ito weak form against a bump test function",
     run_weakform},
    {"duality", "solution paired with a test function carried by the forward flow", run_duality},
    {"stability-data", "solution distance under mollified initial data, with input ratios",
     run_stability_data},
    {"stability-drift", "weighted Sobolev solution distance under mollified drifts",
     run_stability_drift},
    {"moments", "coupled flow and Jacobian convergence moments for a mollified-drift ladder",
     run_moments},
    {"regularization", "Holder seminorm growth with and without noise on the same rough field",
     run_regularization},
};

std::string timestamp_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& def : kExperiments) out.push_back(def.name);
        return out;
    }();
    return names;
}

bool is_experiment(const std::string& name) {
    for (const auto& def : kExperiments)
        if (name == def.name) return true;
    return false;
}

std::string experiment_summary(const std::string& name) {
    for (const auto& def : kExperiments)
        if (name == def.name) return def.summary;
    throw std::invalid_argument("unknown experiment: " + name);
}

std::string default_output_dir() {
    const char* env = std::getenv("STMC_OUTPUT_DIR");
    return env && *env ? env : ".";
}

ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg,
                                const std::string& output_dir) {
    const ExperimentDef* def = nullptr;
    for (const auto& candidate : kExperiments)
        if (name == candidate.name) def = &candidate;
    if (!def) throw std::invalid_argument("unknown experiment: " + name);

    const auto violations = cfg.validate();
    if (!violations.empty()) {
        throw std::invalid_argument("invalid config: " + violations.front().field + ": " +
                                    violations.front().message);
    }

    namespace fs = std::filesystem;
    const fs::path dir(output_dir.empty() ? default_output_dir() : output_dir);
    fs::create_directories(dir);
    const std::string stem = name + "-" + cfg.hash_hex();
    const fs::path csv_path = dir / (stem + ".csv");
    const fs::path json_path = dir / (stem + ".json");

    json extras;
    const auto t0 = std::chrono::steady_clock::now();
    {
        std::ofstream csv(csv_path);
        if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
        extras = def->run(cfg, csv);
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    json sidecar;
    sidecar["format_version"] = 1;
    sidecar["experiment"] = name;
    sidecar["config"] = json::object();
    for (const auto& [key, value] : cfg.entries()) sidecar["config"][key] = value;
    sidecar["outputs"] = json::array({csv_path.filename().string()});
    sidecar["results"] = extras;
    sidecar["wall_seconds"] = wall;
    sidecar["written_at"] = timestamp_utc();
    {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("cannot write " + json_path.string());
        out << sidecar.dump(2) << '\n';
    }

    return {{csv_path.string(), json_path.string()}, wall};
}

}  // namespace stmc
