#include "stmc/drift.hpp"

#include <cmath>
#include <stdexcept>

#include "stmc/brownian.hpp"

namespace stmc {

namespace {

constexpr std::uint64_t kPhaseSalt = 0xA24BAED4963EE407ull;
constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Drift Drift::zero(int dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Drift: dim must be in [1,3]");
    Drift b;
    b.kind_ = Kind::Zero;
    b.dim_ = dim;
    b.theta_ = 1.0;
    b.growth_ = 0.0;
    return b;
}

Drift Drift::constant(const Vec& c) {
    Drift b;
    b.kind_ = Kind::Constant;
    b.dim_ = c.dim();
    b.theta_ = 1.0;
    b.constant_ = c;
    b.growth_ = c.norm();
    return b;
}

Drift Drift::linear(const Mat& a) {
    Drift b;
    b.kind_ = Kind::Linear;
    b.dim_ = a.dim();
    b.theta_ = 1.0;
    b.linear_ = a;
    b.growth_ = a.frobenius();
    return b;
}

Drift Drift::rough(int dim, const RoughParams& params) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Drift: dim must be in [1,3]");
    if (!(params.theta > 0.0 && params.theta < 1.0))
        throw std::invalid_argument("Drift: rough theta must lie in (0,1)");
    if (params.ladder_size < 1) throw std::invalid_argument("Drift: rough ladder must have at least one rung");
    if (!(params.amplitude >= 0.0)) throw std::invalid_argument("Drift: rough amplitude must be nonnegative");

    Drift b;
    b.kind_ = Kind::Rough;
    b.dim_ = dim;
    b.theta_ = params.theta;
    b.rough_ = params;

    const int K = params.ladder_size;
    b.freqs_.resize(static_cast<std::size_t>(K));
    b.amps_.resize(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) {
        b.freqs_[static_cast<std::size_t>(k)] = std::pow(2.0, k);
        b.amps_[static_cast<std::size_t>(k)] = params.amplitude * std::pow(2.0, -params.theta * k);
    }

    // Directions and phases are a pure function of phase_seed, so a rough
    // field is identified by its parameters alone.
    const std::uint64_t stream = mix64(params.phase_seed ^ kPhaseSalt);
    b.wave_dirs_.reserve(static_cast<std::size_t>(dim) * K);
    b.phases_.reserve(static_cast<std::size_t>(dim) * K);
    for (int i = 0; i < dim; ++i) {
        for (int k = 0; k < K; ++k) {
            const std::uint64_t block = (static_cast<std::uint64_t>(i) * K + k) * (kMaxDim + 1);
            Vec dir(dim);
            if (dim == 1) {
                dir[0] = 1.0;
            } else {
                double norm_sq = 0.0;
                do {
                    for (int a = 0; a < dim; ++a) dir[a] = normal_from_counter(stream, block + a);
                    norm_sq = dir.norm_sq();
                } while (norm_sq < 1e-12);
                dir *= 1.0 / std::sqrt(norm_sq);
            }
            b.wave_dirs_.push_back(dir);
            b.phases_.push_back(kTwoPi * uniform_from_counter(stream, block + kMaxDim));
        }
    }

    double ladder_sum = 0.0;
    for (double a : b.amps_) ladder_sum += a;
    b.growth_ = std::max(ladder_sum * std::sqrt(double(dim)), std::fabs(params.tail_slope));
    return b;
}

Drift mollify(const Drift& b, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify: width must be positive");
    Drift m;
    m.kind_ = Drift::Kind::Mollified;
    m.dim_ = b.dim_;
    m.theta_ = b.theta_;
    m.base_ = std::make_shared<Drift>(b);
    m.eps_ = eps;
    m.eps_total_ = std::hypot(eps, b.eps_total_);
    m.root_ = b.kind_ == Drift::Kind::Mollified ? b.root_ : m.base_.get();
    m.growth_ = b.growth_ * (1.0 + eps * std::sqrt(double(b.dim_)));

    // A Gaussian of width eps1 convolved with one of width eps2 is a Gaussian
    // of width hypot(eps1, eps2), so the mollified ladder keeps its shape and
    // rung k is damped by exp(-freq_k^2 eps^2 / 2).  Precomputed: this sits
    // in the integrator's innermost loop.
    if (m.root_->kind_ == Drift::Kind::Rough) {
        m.freqs_ = m.root_->freqs_;
        m.amps_ = m.root_->amps_;
        for (std::size_t k = 0; k < m.amps_.size(); ++k) {
            const double f = m.freqs_[k];
            m.amps_[k] *= std::exp(-0.5 * f * f * m.eps_total_ * m.eps_total_);
        }
    }
    return m;
}

bool Drift::has_closed_divergence() const {
    const Drift* r = kind_ == Kind::Mollified ? root_ : this;
    return r->kind_ == Kind::Zero || r->kind_ == Kind::Constant || r->kind_ == Kind::Linear;
}

Vec Drift::eval_rough(const Vec& x) const {
    // kind_ is Rough, or Mollified with a Rough root; freqs_/amps_ belong to
    // *this (damped for the mollified case), geometry to the root field.
    const Drift* r = kind_ == Kind::Mollified ? root_ : this;
    const int K = r->rough_.ladder_size;
    Vec out(dim_);
    for (int i = 0; i < dim_; ++i) {
        double s = 0.0;
        for (int k = 0; k < K; ++k) {
            const std::size_t idx = static_cast<std::size_t>(i) * K + k;
            s += amps_[static_cast<std::size_t>(k)]
               * std::sin(freqs_[static_cast<std::size_t>(k)] * r->wave_dirs_[idx].dot(x)
                          + r->phases_[idx]);
        }
        out[i] = s + r->rough_.tail_slope * x[i];
    }
    return out;
}

Vec Drift::eval(const Vec& x) const {
    if (x.dim() != dim_) throw std::invalid_argument("Drift: point dimension mismatch");
    switch (kind_) {
        case Kind::Zero:
            return Vec(dim_);
        case Kind::Constant:
            return constant_;
        case Kind::Linear:
            return linear_ * x;
        case Kind::Rough:
            return eval_rough(x);
        case Kind::Mollified:
            switch (root_->kind_) {
                case Kind::Zero: return Vec(dim_);
                case Kind::Constant: return root_->constant_;
                case Kind::Linear: return root_->linear_ * x;
                case Kind::Rough: return eval_rough(x);
                default: break;
            }
            return mollify_quadrature(*root_, eps_total_, x);
    }
    throw std::logic_error("Drift: unreachable kind");
}

double Drift::default_fd_step() const { return std::max(1e-4, eps_total_ / 10.0); }

double Drift::divergence(const Vec& x, double fd_step) const {
    if (has_closed_divergence()) {
        const Drift* r = kind_ == Kind::Mollified ? root_ : this;
        return r->kind_ == Kind::Linear ? r->linear_.trace() : 0.0;
    }
    if (kind_ == Kind::Rough && !(fd_step > 0.0))
        throw std::invalid_argument(
            "Drift: divergence unavailable for the rough field without a finite-difference step");
    const double h = fd_step > 0.0 ? fd_step : 1e-4;
    double div = 0.0;
    for (int a = 0; a < dim_; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        div += (eval(xp)[a] - eval(xm)[a]) / (2.0 * h);
    }
    return div;
}

Mat Drift::jacobian(const Vec& x, double fd_step) const {
    const Drift* r = kind_ == Kind::Mollified ? root_ : this;
    switch (r->kind_) {
        case Kind::Zero:
        case Kind::Constant:
            return Mat(dim_);
        case Kind::Linear:
            return r->linear_;
        default:
            break;
    }
    const double h = fd_step > 0.0 ? fd_step : default_fd_step();
    Mat j(dim_);
    for (int a = 0; a < dim_; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const Vec bp = eval(xp), bm = eval(xm);
        for (int i = 0; i < dim_; ++i) j(i, a) = (bp[i] - bm[i]) / (2.0 * h);
    }
    return j;
}

Vec mollify_quadrature(const Drift& base, double eps, const Vec& x,
                       int nodes_per_axis, double support_radius) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollify_quadrature: width must be positive");
    if (nodes_per_axis < 3 || nodes_per_axis % 2 == 0)
        throw std::invalid_argument("mollify_quadrature: nodes per axis must be odd and >= 3");

    const int d = base.dim();
    const int m = nodes_per_axis / 2;
    const double step = support_radius * eps / m;

    // Per-axis offsets j*step, j = -m..m, with Gaussian weights; symmetric by
    // construction so odd moments cancel.
    std::vector<double> offset(static_cast<std::size_t>(nodes_per_axis));
    std::vector<double> weight(static_cast<std::size_t>(nodes_per_axis));
    for (int j = -m; j <= m; ++j) {
        const double z = j * step;
        offset[static_cast<std::size_t>(j + m)] = z;
        weight[static_cast<std::size_t>(j + m)] = std::exp(-0.5 * z * z / (eps * eps));
    }

    Vec acc(d);
    double total_weight = 0.0;
    int idx[kMaxDim] = {0, 0, 0};
    while (true) {
        double w = 1.0;
        Vec y = x;
        for (int a = 0; a < d; ++a) {
            w *= weight[static_cast<std::size_t>(idx[a])];
            y[a] -= offset[static_cast<std::size_t>(idx[a])];
        }
        acc += w * base.eval(y);
        total_weight += w;

        int a = 0;
        while (a < d && ++idx[a] == nodes_per_axis) idx[a++] = 0;
        if (a == d) break;
    }
    return (1.0 / total_weight) * acc;
}

VectorField drift_difference(const Drift& a, const Drift& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("drift_difference: dimension mismatch");
    return [a, b](const Vec& x) { return a.eval(x) - b.eval(x); };
}

HolderNorm holder_norm_estimate(const VectorField& f, int dim, const Box& box,
                                double grid_step, double theta) {
    if (!(theta > 0.0 && theta <= 1.0))
        throw std::invalid_argument("holder_norm_estimate: theta must lie in (0,1]");
    UniformGrid grid(box, grid_step);
    if (grid.dim() != dim) throw std::invalid_argument("holder_norm_estimate: dimension mismatch");

    const std::size_t n = grid.node_count();
    std::vector<Vec> values(n);
    std::vector<Vec> points(n);
    for (std::size_t i = 0; i < n; ++i) {
        points[i] = grid.node(i);
        values[i] = f(points[i]);
    }

    HolderNorm est;
    for (std::size_t i = 0; i < n; ++i)
        est.weighted_sup = std::max(est.weighted_sup, values[i].norm() / (1.0 + points[i].norm()));

    // Pair scan restricted to |x - y| <= 1: walk a window of at most
    // ceil(1/h) nodes per axis around each node, counting each pair once.
    const int n_axis = grid.nodes_per_axis();
    const int window = static_cast<int>(std::ceil(1.0 / grid_step));
    int base_idx[kMaxDim] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        {
            std::size_t rem = i;
            for (int a = dim - 1; a >= 0; --a) {
                base_idx[a] = static_cast<int>(rem % static_cast<std::size_t>(n_axis));
                rem /= static_cast<std::size_t>(n_axis);
            }
        }
        int off[kMaxDim] = {0, 0, 0};
        int lo[kMaxDim], hi[kMaxDim];
        for (int a = 0; a < dim; ++a) {
            lo[a] = std::max(-window, -base_idx[a]);
            hi[a] = std::min(window, n_axis - 1 - base_idx[a]);
            off[a] = lo[a];
        }
        while (true) {
            std::size_t j = 0;
            for (int a = 0; a < dim; ++a)
                j = j * static_cast<std::size_t>(n_axis)
                  + static_cast<std::size_t>(base_idx[a] + off[a]);
            if (j > i) {
                const double dist = (points[j] - points[i]).norm();
                if (dist > 0.0 && dist <= 1.0) {
                    const double quot = (values[j] - values[i]).norm() / std::pow(dist, theta);
                    est.seminorm = std::max(est.seminorm, quot);
                }
            }
            int a = 0;
            while (a < dim && ++off[a] > hi[a]) {
                off[a] = lo[a];
                ++a;
            }
            if (a == dim) break;
        }
    }
    return est;
}

HolderNorm holder_norm_estimate(const Drift& b, const Box& box, double grid_step, double theta) {
    return holder_norm_estimate([&b](const Vec& x) { return b.eval(x); }, b.dim(), box, grid_step, theta);
}

}  // namespace stmc
