#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stmc/experiment.hpp"
#include "stmc/flow.hpp"

namespace {

constexpr int kExitConfig = 2;      // configuration rejected
constexpr int kExitDivergence = 3;  // a characteristic escaped the guard

// Defaults, then the config file, then --set overrides, in that order.
int load_config(const std::string& config_file, const std::vector<std::string>& overrides,
                stmc::ExperimentConfig& cfg) {
    try {
        cfg = config_file.empty() ? stmc::ExperimentConfig::defaults()
                                  : stmc::ExperimentConfig::from_file(config_file);
        for (const auto& assignment : overrides) cfg.apply_assignment(assignment);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return 0;
}

int report_violations(const stmc::ExperimentConfig& cfg) {
    const auto violations = cfg.validate();
    for (const auto& v : violations) {
        std::fprintf(stderr, "invalid config: %s: %s\n", v.field.c_str(), v.message.c_str());
    }
    return violations.empty() ? 0 : kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pathwise Monte Carlo solver for transport with rough drift and additive noise"};
    app.require_subcommand(1);

    std::string experiment;
    std::string config_file;
    std::string output_dir;
    std::vector<std::string> overrides;

    CLI::App* run = app.add_subcommand("run", "run one experiment and write CSV + JSON output");
    run->add_option("experiment", experiment, "experiment name (see list-experiments)")
        ->required();
    run->add_option("--config", config_file, "key=value config file");
    run->add_option("--set", overrides, "override one key=value (repeatable)");
    run->add_option("--output-dir", output_dir,
                    "output directory (default: STMC_OUTPUT_DIR or .)");

    CLI::App* validate = app.add_subcommand("validate", "check a configuration and report issues");
    validate->add_option("--config", config_file, "key=value config file");
    validate->add_option("--set", overrides, "override one key=value (repeatable)");

    CLI::App* list = app.add_subcommand("list-experiments", "print the experiment catalog");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& name : stmc::experiment_names()) {
            std::printf("%-16s %s\n", name.c_str(), stmc::experiment_summary(name).c_str());
        }
        return 0;
    }

    stmc::ExperimentConfig cfg;
    if (const int rc = load_config(config_file, overrides, cfg); rc != 0) return rc;

    if (validate->parsed()) {
        if (const int rc = report_violations(cfg); rc != 0) return rc;
        std::printf("config ok (hash %s)\n", cfg.hash_hex().c_str());
        return 0;
    }

    if (!stmc::is_experiment(experiment)) {
        std::fprintf(stderr, "error: unknown experiment: %s\n", experiment.c_str());
        std::fprintf(stderr, "known experiments:\n");
        for (const auto& name : stmc::experiment_names()) {
            std::fprintf(stderr, "  %s\n", name.c_str());
        }
        return kExitConfig;
    }
    if (const int rc = report_violations(cfg); rc != 0) return rc;

    try {
        const stmc::ExperimentOutput out = stmc::run_experiment(experiment, cfg, output_dir);
        for (const auto& file : out.files) std::printf("wrote %s\n", file.c_str());
        std::printf("wall_seconds %.3f\n", out.wall_seconds);
        return 0;
    } catch (const stmc::FlowDivergence& e) {
        if (e.path_index() >= 0) {
            std::fprintf(stderr, "error: flow diverged on path %d at step %d: %s\n",
                         e.path_index(), e.step(), e.reason().c_str());
        } else {
            std::fprintf(stderr, "error: %s\n", e.what());
        }
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
