#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "stmc/brownian.hpp"
#include "stmc/drift.hpp"
#include "stmc/grid.hpp"

// Discrete norms on grid functions (midpoint quadrature, optional Gaussian
// weight exp(-|x|^2)) and the coupled Monte Carlo moments that quantify how
// the flows of a mollified-drift sequence converge: for each member, over a
// set of start points x and start times s,
//
//   (a)  sup_x sup_s E[ sup_t |Dphi^n - Dphi|^p ]        (Frobenius norm)
//   (b)  sup_x sup_s E[ sup_t |phi^n - phi|^p / (1+|x|)^p ]
//   (c)  sup_x sup_s E[ sup_t |Dphi^n|^p ]
//
// with the finest member of the sequence standing in for the limit flow and
// every member driven by the same Brownian paths.

namespace stmc {

// q with 1/p + 1/q = 1; rejects p <= 1.
double conjugate_exponent(double p);

double lp_norm(const GridFunction& f, double p, bool gaussian_weight);

// ( sum over interior nodes of |grad f|^p exp(-|x|^2) h^d )^(1/p).
double weighted_sobolev_seminorm(const GridFunction& f, double p);

// sup over node pairs 0 < |x-y| <= 1 of |f(x)-f(y)| / |x-y|^theta.
double grid_holder_seminorm(const GridFunction& f, double theta);

struct MomentRow {
    int sequence_index = 0;
    double epsilon = 0.0;       // mollification width of the member (0 if none)
    std::string statistic;      // "jacobian_gap", "state_gap", "jacobian_moment"
    double value = 0.0;
    double std_error = 0.0;     // MC error at the maximizing (x, s)
    int n_paths = 0;
    std::string grid_id;
};

struct MomentTable {
    std::vector<MomentRow> rows;
    void write_csv(std::ostream& out) const;
    const MomentRow& find(int sequence_index, const std::string& statistic) const;
};

MomentTable flow_moment_estimates(const Drift& b, std::span<const Drift> approx_sequence, double p,
                                  std::span<const Vec> points, std::span<const double> s_times,
                                  double horizon, int n_steps, int n_paths, std::uint64_t seed);

}  // namespace stmc
