#pragma once

#include <string>

#include "stmc/grid.hpp"
#include "stmc/linalg.hpp"

// Initial profiles u0 with a known global range.  The catalog spans the
// regularity regimes the solver is tested against: a smooth Gaussian bump, a
// smoothed indicator (plateau with smooth shoulders), and a cone, which is
// Sobolev but has gradient jumps at the apex and rim.
//
// mollify_initial_data mirrors the two-step regularization of irregular
// data: convolve with a Gaussian of width eps, then multiply by the wide
// cutoff eta(eps x) which is 1 on |x| <= 1/eps and vanishes beyond 2/eps.

namespace stmc {

struct InitialData {
    std::string name;
    int dim = 1;
    ScalarMap f;
    double min_value = 0.0;  // global bounds over all of R^d, not just a box
    double max_value = 0.0;
};

InitialData gaussian_bump(int dim, const Vec& center, double width, double height = 1.0);

// height inside |x| <= radius - edge_width, 0 outside |x| >= radius, smooth.
InitialData smoothed_indicator(int dim, double radius, double edge_width, double height = 1.0);

// height * (1 - |x|/radius)+ ; Lipschitz with kinks, not C^1.
InitialData cone(int dim, double radius, double height = 1.0);

// Smooth transition: 0 for s <= 0, 1 for s >= 1.
double smooth_step(double s);

InitialData mollify_initial_data(const InitialData& u0, double eps,
                                 int nodes_per_axis = 33, double support_radius = 4.0);

}  // namespace stmc
