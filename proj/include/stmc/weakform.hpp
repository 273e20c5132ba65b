#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "stmc/transport.hpp"

// Weak-form diagnostics for a pathwise transport solution.
//
// Against a fixed test function phi, the solution should satisfy, in Ito
// form with additive noise,
//
//   int u(t) phi = int u0 phi - int_0^t int (b . grad u) phi dx ds
//                + int_0^t int u d_i phi dx dB^i + 1/2 int_0^t int u lap(phi) dx ds,
//
// so the reported residual is
//
//   R = int u(t) phi - int u0 phi + drift_term - martingale_term - laplacian_term,
//
// built from midpoint space quadrature, left-endpoint (Ito) time sums, and
// central-difference gradients of the grid solution.  R should vanish at the
// statistical-plus-discretization level; dropping the Laplacian term breaks
// it by an order-one amount, which is the standard ablation check.

namespace stmc {

struct ResidualSample {
    std::size_t path_index = 0;
    double t = 0.0;
    double residual = 0.0;
    double drift_term = 0.0;       // int_0^t int (b . grad u) phi dx ds
    double martingale_term = 0.0;  // int_0^t int u d_i phi dx dB^i
    double laplacian_term = 0.0;   // 1/2 int_0^t int u lap(phi) dx ds
};

struct ResidualReport {
    std::vector<ResidualSample> samples;

    double mean() const;
    double std_error() const;
    // Residual recomputed with the Laplacian term deleted.
    double mean_without_laplacian() const;
    double std_error_without_laplacian() const;

    void write_csv(std::ostream& out) const;
};

// Residual of one path solution at grid time t; sol must hold fields at
// every path-grid time up to t, and phi must be supported well inside the
// box so its support never touches nodes where the gradient is one-sided.
ResidualSample ito_residual(const PathSolution& sol, const Drift& b, const TestFunction& phi,
                            double t, std::size_t path_index = 0);

// int u(t, X_{0,t}(x)) phi(x) dx on the same path the solution was built on:
// forward-flow each quadrature node, evaluate u(t, .) there through the
// solution's representation.  Pathwise this collapses to int u0 phi, so for
// zero initial data it vanishes identically.
double duality_pairing(const PathSolution& sol, const Drift& b, const TestFunction& phi,
                       const BrownianPath& path, double t);

}  // namespace stmc
