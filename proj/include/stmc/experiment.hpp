#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stmc/drift.hpp"
#include "stmc/grid.hpp"
#include "stmc/initial_data.hpp"
#include "stmc/test_function.hpp"

// Named experiments driven by a flat key=value configuration.
//
// A configuration starts from the built-in defaults, optionally absorbs a
// config file (one `key=value` per line, `#` comments), and finally applies
// command-line overrides.  Unknown keys are rejected at the door; value
// problems are collected by validate() so a caller can report all of them at
// once.  Every experiment writes CSV output whose name embeds a hash of the
// configuration, plus a JSON sidecar with the run metadata.  Timestamps and
// timings live only in the sidecar, so CSVs from identical configurations
// are byte-identical regardless of thread count or wall clock.

namespace stmc {

struct ConfigViolation {
    std::string field;
    std::string message;
};

class ExperimentConfig {
public:
    // Built-in defaults for every key.
    static ExperimentConfig defaults();

    // Defaults overlaid with the file's assignments.
    static ExperimentConfig from_file(const std::string& path);

    // One `key=value` assignment on top of the current state.
    void apply_assignment(const std::string& assignment);
    void set(const std::string& key, const std::string& value);

    const std::string& raw(const std::string& key) const;
    const std::map<std::string, std::string>& entries() const { return entries_; }

    int get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    double get_real(const std::string& key) const;
    std::string get_word(const std::string& key) const;
    // Comma-separated reals; a single value broadcasts to `expect` components.
    std::vector<double> get_reals(const std::string& key, int expect) const;

    // All value and cross-field problems, empty when runnable.
    std::vector<ConfigViolation> validate() const;

    // FNV-1a over the sorted key=value lines; names the output files.
    std::uint64_t hash() const;
    std::string hash_hex() const;

private:
    std::map<std::string, std::string> entries_;
};

// Objects a valid configuration describes.
UniformGrid grid_from_config(const ExperimentConfig& cfg);
Drift drift_from_config(const ExperimentConfig& cfg);
InitialData initial_data_from_config(const ExperimentConfig& cfg);
TestFunction test_function_from_config(const ExperimentConfig& cfg);

struct ExperimentOutput {
    std::vector<std::string> files;  // everything written, CSV first
    double wall_seconds = 0.0;
};

// The experiment catalog, in presentation order.
const std::vector<std::string>& experiment_names();
bool is_experiment(const std::string& name);
std::string experiment_summary(const std::string& name);

// STMC_OUTPUT_DIR when set, "." otherwise.
std::string default_output_dir();

// Runs one experiment on a configuration that passed validate(); creates the
// output directory if needed and returns the files written.  Throws
// std::invalid_argument for an unknown name and FlowDivergence (tagged with
// the path index) when a characteristic escapes.
ExperimentOutput run_experiment(const std::string& name, const ExperimentConfig& cfg,
                                const std::string& output_dir);

}  // namespace stmc
