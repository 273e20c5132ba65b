#pragma once

#include <functional>
#include <span>
#include <vector>

#include "stmc/brownian.hpp"
#include "stmc/drift.hpp"
#include "stmc/flow.hpp"
#include "stmc/grid.hpp"
#include "stmc/initial_data.hpp"
#include "stmc/test_function.hpp"

// Pathwise transport solutions by the method of stochastic characteristics:
// u(t, x) = u0(Y_{0,t}(x)) with Y the backward flow, sampled on a grid at
// the requested output times.  Values never leave [min u0, max u0], and at
// t = 0 the grid holds u0 exactly.

namespace stmc {

class PathSolution {
public:
    PathSolution(Drift b, InitialData u0, BrownianPath path, std::vector<double> times,
                 UniformGrid grid, FlowOptions flow_options);

    const Drift& drift() const { return drift_; }
    const InitialData& initial_data() const { return u0_; }
    const BrownianPath& path() const { return path_; }
    const UniformGrid& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }

    const GridFunction& field(std::size_t i) const { return fields_[i]; }
    const GridFunction& at_time(double t) const;
    bool has_time(double t) const;

    // u(t, x) at an arbitrary point, evaluated through the representation
    // (backward flow from (t, x), then u0); exact off the grid up to the
    // integrator, with no interpolation error.
    double eval(double t, const Vec& x) const;

    friend PathSolution renormalize(const PathSolution& sol,
                                    const std::function<double(double)>& beta,
                                    const std::string& beta_name);

private:
    Drift drift_;
    InitialData u0_;
    BrownianPath path_;
    std::vector<double> times_;
    UniformGrid grid_;
    FlowOptions flow_options_;
    std::vector<GridFunction> fields_;
};

PathSolution solve_characteristics(const Drift& b, const InitialData& u0, const BrownianPath& path,
                                   std::span<const double> times, const UniformGrid& grid,
                                   const FlowOptions& flow_options = {});

// beta applied nodewise; solving with beta(u0) directly gives bit-identical
// fields, which is the pathwise renormalization property.
PathSolution renormalize(const PathSolution& sol, const std::function<double(double)>& beta,
                         const std::string& beta_name);

// Density of the continuity equation dual to the transport dynamics:
// v(t, x) = det DY_{0,t}(x) * phi(Y_{0,t}(x)).  Needs a smooth drift for the
// variational Jacobian; integrates to the integral of phi up to O(dt + h^2).
GridFunction dual_density(const Drift& b, const TestFunction& phi, const BrownianPath& path,
                          double t, const UniformGrid& grid, const FlowOptions& flow_options = {});

}  // namespace stmc
