#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "stmc/grid.hpp"
#include "stmc/linalg.hpp"

// Autonomous velocity fields b : R^d -> R^d with linear growth.
//
// The catalog covers the regimes the solver is exercised against: zero and
// constant fields (exact translations), linear fields (closed-form flows),
// a "rough" field of prescribed Holder regularity, and Gaussian-mollified
// versions of any of these.
//
// The rough field is a finite lacunary ladder plus a linear tail,
//
//   b_i(x) = amplitude * sum_{k<K} 2^{-theta k} sin(2^k <dir_ik, x> + phase_ik)
//            + tail_slope * x_i,
//
// with unit directions and phases drawn deterministically from phase_seed.
// Across scales 2^-K..1 it behaves like a C^theta field (slopes up to
// 2^{(1-theta)K} but uniformly bounded theta-quotients) while the tail keeps
// it unbounded with linear growth.  Mollification of the ladder has a closed
// form: frequency 2^k is damped by exp(-4^k eps^2 / 2).

namespace stmc {

class Drift {
public:
    enum class Kind { Zero, Constant, Linear, Rough, Mollified };

    struct RoughParams {
        double theta = 0.5;
        double amplitude = 1.0;
        int ladder_size = 8;
        double tail_slope = -0.5;
        std::uint64_t phase_seed = 0;
    };

    static Drift zero(int dim);
    static Drift constant(const Vec& c);
    static Drift linear(const Mat& a);
    static Drift rough(int dim, const RoughParams& params);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    // Holder exponent the field is guaranteed to have (1 for smooth kinds).
    double theta() const { return theta_; }

    // C with |b(x)| <= C (1 + |x|) at every point.
    double growth_constant() const { return growth_; }

    // Smooth enough for variational Jacobians; false only for the raw ladder.
    bool smooth() const { return kind_ != Kind::Rough; }

    bool has_closed_divergence() const;

    // Accumulated Gaussian width if this field is a mollification, else 0.
    double mollification_width() const { return eps_total_; }

    Vec eval(const Vec& x) const;

    // Divergence; fd_step = 0 selects the closed form when one exists, a
    // default central-difference step of 1e-4 for mollified fields, and is
    // rejected for the raw rough field (supply a step there).
    double divergence(const Vec& x, double fd_step = 0.0) const;

    // Field Jacobian Db; fd_step = 0 selects the closed form or the default
    // central-difference step max(1e-4, eps/10).
    Mat jacobian(const Vec& x, double fd_step = 0.0) const;

    double default_fd_step() const;

    friend Drift mollify(const Drift& b, double eps);

private:
    Drift() = default;

    Vec eval_rough(const Vec& x) const;

    Kind kind_ = Kind::Zero;
    int dim_ = 1;
    double theta_ = 1.0;
    double growth_ = 0.0;

    Vec constant_;
    Mat linear_;
    RoughParams rough_;
    std::vector<Vec> wave_dirs_;    // per (coordinate, rung)
    std::vector<double> phases_;
    std::vector<double> freqs_;     // per rung; damped amplitudes when mollified
    std::vector<double> amps_;

    std::shared_ptr<const Drift> base_;  // set for Kind::Mollified
    double eps_ = 0.0;                   // this layer's width
    double eps_total_ = 0.0;             // combined width down to the root
    const Drift* root_ = nullptr;        // innermost non-mollified field
};

// Gaussian mollification b * rho_eps, closed form where the base admits one.
Drift mollify(const Drift& b, double eps);

// Direct tensor-product quadrature of the mollification integral against the
// Gaussian kernel, over [-r eps, r eps]^d.  Reference-grade; the mollified
// drift's own eval is tested against this.
Vec mollify_quadrature(const Drift& base, double eps, const Vec& x,
                       int nodes_per_axis = 33, double support_radius = 4.0);

using VectorField = std::function<Vec(const Vec&)>;

// Pointwise difference a - b of two fields of equal dimension.
VectorField drift_difference(const Drift& a, const Drift& b);

struct HolderNorm {
    double weighted_sup = 0.0;  // sup |f(x)| / (1 + |x|)
    double seminorm = 0.0;      // sup over pairs |x-y| <= 1 of the theta-quotient
    double total() const { return weighted_sup + seminorm; }
};

// Grid estimate of the two-term Holder norm over the box: weighted sup at the
// nodes plus the seminorm over node pairs separated by at most 1.
HolderNorm holder_norm_estimate(const VectorField& f, int dim, const Box& box,
                                double grid_step, double theta);
HolderNorm holder_norm_estimate(const Drift& b, const Box& box, double grid_step, double theta);

}  // namespace stmc
