#include "stmc/initial_data.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace stmc {

double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

InitialData gaussian_bump(int dim, const Vec& center, double width, double height) {
    if (center.dim() != dim) throw std::invalid_argument("gaussian_bump: center dimension mismatch");
    if (!(width > 0.0)) throw std::invalid_argument("gaussian_bump: width must be positive");
    InitialData u0;
    u0.name = "gaussian";
    u0.dim = dim;
    u0.min_value = 0.0;
    u0.max_value = height;
    u0.f = [center, width, height](const Vec& x) {
        return height * std::exp(-0.5 * (x - center).norm_sq() / (width * width));
    };
    return u0;
}

InitialData smoothed_indicator(int dim, double radius, double edge_width, double height) {
    if (!(radius > 0.0) || !(edge_width > 0.0) || edge_width >= radius)
        throw std::invalid_argument("smoothed_indicator: needs 0 < edge_width < radius");
    InitialData u0;
    u0.name = "plateau";
    u0.dim = dim;
    u0.min_value = 0.0;
    u0.max_value = height;
    u0.f = [radius, edge_width, height, dim](const Vec& x) {
        (void)dim;
        return height * smooth_step((radius - x.norm()) / edge_width);
    };
    return u0;
}

InitialData cone(int dim, double radius, double height) {
    if (!(radius > 0.0)) throw std::invalid_argument("cone: radius must be positive");
    InitialData u0;
    u0.name = "cone";
    u0.dim = dim;
    u0.min_value = 0.0;
    u0.max_value = height;
    u0.f = [radius, height](const Vec& x) {
        const double r = 1.0 - x.norm() / radius;
        return r > 0.0 ? height * r : 0.0;
    };
    return u0;
}

InitialData mollify_initial_data(const InitialData& u0, double eps,
                                 int nodes_per_axis, double support_radius) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify_initial_data: width must be positive");
    if (nodes_per_axis < 3 || nodes_per_axis % 2 == 0)
        throw std::invalid_argument("mollify_initial_data: nodes per axis must be odd and >= 3");

    const int d = u0.dim;
    const int m = nodes_per_axis / 2;
    const double step = support_radius * eps / m;

    auto offsets = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nodes_per_axis));
    auto weights = std::make_shared<std::vector<double>>(static_cast<std::size_t>(nodes_per_axis));
    double axis_weight = 0.0;
    for (int j = -m; j <= m; ++j) {
        const double z = j * step;
        (*offsets)[static_cast<std::size_t>(j + m)] = z;
        (*weights)[static_cast<std::size_t>(j + m)] = std::exp(-0.5 * z * z / (eps * eps));
        axis_weight += (*weights)[static_cast<std::size_t>(j + m)];
    }
    double total_weight = 1.0;
    for (int a = 0; a < d; ++a) total_weight *= axis_weight;

    InitialData out;
    out.name = u0.name + "_mollified";
    out.dim = d;
    // Convolution with a probability kernel preserves the range; the cutoff
    // scales toward zero, so 0 joins the bounds.
    out.min_value = std::min(0.0, u0.min_value);
    out.max_value = std::max(0.0, u0.max_value);
    const ScalarMap base = u0.f;
    const int n_axis = nodes_per_axis;
    out.f = [base, offsets, weights, total_weight, eps, d, n_axis](const Vec& x) {
        double acc = 0.0;
        int idx[kMaxDim] = {0, 0, 0};
        while (true) {
            double w = 1.0;
            Vec y = x;
            for (int a = 0; a < d; ++a) {
                w *= (*weights)[static_cast<std::size_t>(idx[a])];
                y[a] -= (*offsets)[static_cast<std::size_t>(idx[a])];
            }
            acc += w * base(y);
            int a = 0;
            while (a < d && ++idx[a] == n_axis) idx[a++] = 0;
            if (a == d) break;
        }
        const double cutoff = smooth_step(2.0 - eps * x.norm());
        return cutoff * acc / total_weight;
    };
    return out;
}

}  // namespace stmc
