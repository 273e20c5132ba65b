#pragma once

#include <cstdint>
#include <vector>

#include "stmc/linalg.hpp"

// Brownian driving paths on a uniform time grid, stored as increments.
//
// Sampling is counter based: increment (step, axis) of a path is a pure
// function of the path seed and the flat counter step*dim + axis, via a
// splitmix64-style bit mix followed by the inverse normal CDF.  A batch
// derives per-path seeds from a master seed, so path k is reproducible
// regardless of batch size, generation order, or thread count.

namespace stmc {

// Finalizing mix of splitmix64; a bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t z);

// Uniform draw in the open interval (0,1) from a seeded counter.
double uniform_from_counter(std::uint64_t seed, std::uint64_t counter);

// Standard normal draw from a seeded counter (inverse CDF of the uniform).
double normal_from_counter(std::uint64_t seed, std::uint64_t counter);

// Inverse of the standard normal CDF (Wichura's rational approximation,
// accurate to full double precision on (0,1)).
double inverse_normal_cdf(double p);

// Seed of path k within a batch generated from a master seed.
std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t k);

struct BrownianPath {
    int dim = 0;
    double horizon = 0.0;  // final time T; the grid is 0, dt, ..., T
    int n_steps = 0;
    std::uint64_t seed = 0;
    std::vector<double> increments;  // n_steps x dim, row-major

    double dt() const { return horizon / n_steps; }
    double time_at(int k) const { return k * dt(); }

    double increment(int step, int axis) const { return increments[static_cast<std::size_t>(step) * dim + axis]; }

    Vec increment_vec(int step) const {
        Vec v(dim);
        for (int a = 0; a < dim; ++a) v[a] = increment(step, a);
        return v;
    }

    // B at grid index k, i.e. the sum of increments 0..k-1 in ascending order.
    Vec cumulative(int k) const;

    // Grid index of time t; rejects t off the grid or outside [0, T].
    int index_of_time(double t) const;
};

// Path with independent N(0, dt) increments per axis.
BrownianPath sample_path(std::uint64_t seed, double horizon, int n_steps, int dim);

// Path with all increments zero (deterministic dynamics on the same grid).
BrownianPath zero_path(double horizon, int n_steps, int dim);

// Same trajectory on a grid coarsened by an integer factor: each coarse
// increment is the sum of `factor` consecutive fine increments.
BrownianPath coarsen(const BrownianPath& path, int factor);

}  // namespace stmc
