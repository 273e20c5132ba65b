#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stmc/drift.hpp"
#include "stmc/grid.hpp"
#include "stmc/initial_data.hpp"
#include "stmc/norms.hpp"
#include "stmc/transport.hpp"

// Stability of the solution map under perturbations of the data and of the
// drift, and the qualitative effect of the noise on regularity.
//
// All comparisons are coupled: every member of a comparison sequence is
// solved against the same Brownian realizations, so an identical member
// yields exactly zero distance.  Space-time distances are discretized with
// midpoint quadrature over the box and uniform right-endpoint sums over
// n_output_times output slices.

namespace stmc {

struct StabilityRecord {
    int n = 0;
    double epsilon = 0.0;        // perturbation label (mollification width etc.)
    double input_distance = 0.0;
    double solution_distance = 0.0;
    double solution_distance_se = 0.0;
    double ratio = 0.0;          // solution_distance / input_distance
};

void write_stability_csv(std::ostream& out, std::span<const StabilityRecord> records);

// Distances for perturbed initial data solved under a common drift.  Both
// distances are the 2p-th power integrals, the solution side averaged over
// paths and time: E int_0^T int |u_n - u|^{2p} dx dt versus
// int |u0_n - u0|^{2p} dx, so their ratio is the stability constant probed.
std::vector<StabilityRecord> initial_data_stability(
    const Drift& b, const InitialData& u0, std::span<const InitialData> u0_sequence,
    std::span<const double> labels, double p, const UniformGrid& grid, int n_output_times,
    double horizon, int n_steps, int n_paths, std::uint64_t seed);

// Distances for perturbed drifts solved from common initial data.  The
// solution side is the weighted space-time Sobolev distance
//   ( E int_0^T int (|u_n - u|^p + |grad(u_n - u)|^p) e^{-|x|^2} dx dt )^{1/p}
// against the reference drift; the input side is the Holder-norm estimate of
// b_n - b over holder_box.  u0 should be continuously differentiable.
std::vector<StabilityRecord> drift_stability(
    const Drift& b, const Drift& reference, std::span<const Drift> sequence,
    const InitialData& u0, double p, const UniformGrid& grid, int n_output_times,
    double horizon, int n_steps, int n_paths, std::uint64_t seed,
    const Box& holder_box, double holder_step);

struct RegularizationReport {
    double theta_prime = 0.0;
    std::vector<double> times;
    std::vector<double> deterministic;     // grid Holder seminorm, zero noise
    std::vector<double> stochastic_mean;   // path-averaged grid Holder seminorm
    std::vector<double> stochastic_se;

    double deterministic_growth() const;   // final seminorm / initial seminorm
    double stochastic_growth() const;
    void write_csv(std::ostream& out) const;
};

// Same initial data and drift, solved once with zero noise and n_paths times
// with noise; tracks the grid Holder seminorm at exponent theta_prime.  With
// a rough drift the deterministic flow parks characteristics at attracting
// stagnation points and steepens u into fronts, while the noise averages
// over the landscape and keeps the modulus moderate.
RegularizationReport regularization_demo(const Drift& b, const InitialData& u0, double theta_prime,
                                         const UniformGrid& grid, int n_output_times,
                                         double horizon, int n_steps, int n_paths,
                                         std::uint64_t seed);

}  // namespace stmc
