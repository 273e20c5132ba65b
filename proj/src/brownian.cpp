#include "stmc/brownian.hpp"

#include <cmath>
#include <stdexcept>

namespace stmc {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;       // splitmix64 increment
constexpr std::uint64_t kSubstreamSalt = 0x5851F42D4C957F2Dull;

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

double uniform_from_counter(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t word = mix64(seed + (counter + 1) * kGamma);
    // 53 high bits, centered in the bin: strictly inside (0,1).
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

double inverse_normal_cdf(double p) {
    // Wichura's PPND16: central rational approximation for |p - 1/2| <= 0.425,
    // two tail approximations in sqrt(-log(tail)) beyond.
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");

    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num = (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
                                 + 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r
                               + 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r
                             + 1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den = (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
                                 + 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r
                               + 5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r
                             + 4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }

    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
                                 + 2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r
                               + 3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r
                             + 4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
                                 + 1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r
                               + 6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r
                             + 2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
                                 + 1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r
                               + 2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r
                             + 5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
                                 + 1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r
                               + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r
                             + 5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double normal_from_counter(std::uint64_t seed, std::uint64_t counter) {
    return inverse_normal_cdf(uniform_from_counter(seed, counter));
}

std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t k) {
    return mix64(mix64(master_seed ^ kSubstreamSalt) + (k + 1) * kGamma);
}

Vec BrownianPath::cumulative(int k) const {
    Vec b(dim);
    for (int s = 0; s < k; ++s)
        for (int a = 0; a < dim; ++a) b[a] += increment(s, a);
    return b;
}

int BrownianPath::index_of_time(double t) const {
    const double step = dt();
    const double pos = t / step;
    const int k = static_cast<int>(std::lround(pos));
    if (k < 0 || k > n_steps || std::fabs(t - k * step) > 1e-9 * std::max(1.0, horizon))
        throw std::invalid_argument("BrownianPath: time is not on the path grid");
    return k;
}

BrownianPath sample_path(std::uint64_t seed, double horizon, int n_steps, int dim) {
    if (n_steps < 1) throw std::invalid_argument("sample_path: n_steps must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("sample_path: horizon must be positive");
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("sample_path: dim must be in [1,3]");

    BrownianPath path;
    path.dim = dim;
    path.horizon = horizon;
    path.n_steps = n_steps;
    path.seed = seed;
    path.increments.resize(static_cast<std::size_t>(n_steps) * dim);
    const double scale = std::sqrt(horizon / n_steps);
    for (std::size_t c = 0; c < path.increments.size(); ++c)
        path.increments[c] = scale * normal_from_counter(seed, c);
    return path;
}

BrownianPath zero_path(double horizon, int n_steps, int dim) {
    if (n_steps < 1) throw std::invalid_argument("zero_path: n_steps must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("zero_path: horizon must be positive");
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("zero_path: dim must be in [1,3]");

    BrownianPath path;
    path.dim = dim;
    path.horizon = horizon;
    path.n_steps = n_steps;
    path.seed = 0;
    path.increments.assign(static_cast<std::size_t>(n_steps) * dim, 0.0);
    return path;
}

BrownianPath coarsen(const BrownianPath& path, int factor) {
    if (factor < 1) throw std::invalid_argument("coarsen: factor must be positive");
    if (path.n_steps % factor != 0) throw std::invalid_argument("coarsen: factor must divide n_steps");
    if (factor == 1) return path;

    BrownianPath coarse;
    coarse.dim = path.dim;
    coarse.horizon = path.horizon;
    coarse.n_steps = path.n_steps / factor;
    coarse.seed = path.seed;
    coarse.increments.assign(static_cast<std::size_t>(coarse.n_steps) * path.dim, 0.0);
    for (int k = 0; k < coarse.n_steps; ++k)
        for (int j = 0; j < factor; ++j)
            for (int a = 0; a < path.dim; ++a)
                coarse.increments[static_cast<std::size_t>(k) * path.dim + a] += path.increment(k * factor + j, a);
    return coarse;
}

}  // namespace stmc
