#include <cmath>

#include "doctest.h"
#include "stmc/drift.hpp"

using namespace stmc;

namespace {

Drift::RoughParams params(double theta, double amplitude, int ladder, double tail,
                          std::uint64_t seed) {
    Drift::RoughParams p;
    p.theta = theta;
    p.amplitude = amplitude;
    p.ladder_size = ladder;
    p.tail_slope = tail;
    p.phase_seed = seed;
    return p;
}

}  // namespace

TEST_CASE("catalog constructors validate their inputs") {
    CHECK_THROWS(Drift::zero(0));
    CHECK_THROWS(Drift::zero(4));
    CHECK_THROWS(Drift::rough(1, params(0.0, 1.0, 4, 0.0, 1)));
    CHECK_THROWS(Drift::rough(1, params(1.0, 1.0, 4, 0.0, 1)));
    CHECK_THROWS(Drift::rough(1, params(0.5, 1.0, 0, 0.0, 1)));
    CHECK_THROWS(Drift::rough(1, params(0.5, -1.0, 4, 0.0, 1)));
    CHECK_THROWS(mollify(Drift::zero(1), -0.5));
}

TEST_CASE("smooth kinds evaluate in closed form") {
    const Drift z = Drift::zero(2);
    CHECK(z.eval({0.3, -0.4}).norm() == 0.0);
    CHECK(z.divergence({0.3, -0.4}) == 0.0);

    const Drift c = Drift::constant({1.5, -2.0});
    CHECK(c.eval({10.0, 3.0})[0] == 1.5);
    CHECK(c.eval({10.0, 3.0})[1] == -2.0);
    CHECK(c.divergence({1.0, 1.0}) == 0.0);

    Mat a(2);
    a(0, 0) = -0.5;
    a(0, 1) = 0.25;
    a(1, 0) = 0.0;
    a(1, 1) = -1.0;
    const Drift lin = Drift::linear(a);
    const Vec v = lin.eval({2.0, 4.0});
    CHECK(v[0] == doctest::Approx(-0.5 * 2.0 + 0.25 * 4.0).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(-4.0).epsilon(1e-15));
    CHECK(lin.divergence({7.0, 7.0}) == doctest::Approx(-1.5).epsilon(1e-15));

    const Mat jac = lin.jacobian({0.1, 0.2});
    CHECK(jac(0, 1) == 0.25);
    CHECK(jac(1, 0) == 0.0);
}

TEST_CASE("rough field is reproducible and respects its growth constant") {
    const Drift b = Drift::rough(2, params(0.4, 1.2, 6, -0.3, 9));
    const Drift same = Drift::rough(2, params(0.4, 1.2, 6, -0.3, 9));
    const Vec probes[] = {Vec{0.0, 0.0}, Vec{1.0, -2.0}, Vec{3.0, 3.0}, Vec{-100.0, 40.0}};
    for (const Vec& x : probes) {
        const Vec v = b.eval(x);
        const Vec w = same.eval(x);
        CHECK(v[0] == w[0]);
        CHECK(v[1] == w[1]);
        CHECK(v.norm() <= b.growth_constant() * (1.0 + x.norm()) * (1.0 + 1e-12));
    }
    CHECK(b.theta() == 0.4);
    CHECK_FALSE(b.smooth());
}

TEST_CASE("rough divergence needs an explicit step and matches the jacobian trace") {
    const Drift b = Drift::rough(2, params(0.35, 1.0, 5, -0.4, 3));
    CHECK_THROWS(b.divergence({0.1, 0.2}));
    const double step = 1e-5;
    const Mat jac = b.jacobian({0.1, 0.2}, step);
    CHECK(b.divergence({0.1, 0.2}, step) == doctest::Approx(jac.trace()).epsilon(1e-12));
}

TEST_CASE("mollification leaves zero, constant and linear fields fixed") {
    const Vec x{0.7, -1.1};
    CHECK(mollify(Drift::zero(2), 0.3).eval(x).norm() == 0.0);

    const Drift c = mollify(Drift::constant({2.0, -1.0}), 0.3);
    CHECK(c.eval(x)[0] == 2.0);
    CHECK(c.eval(x)[1] == -1.0);

    Mat a(2);
    a(0, 0) = -0.5;
    a(1, 1) = 0.75;
    const Drift lin = Drift::linear(a);
    const Drift lin_eps = mollify(lin, 0.3);
    const Vec v = lin.eval(x), w = lin_eps.eval(x);
    CHECK(v[0] == doctest::Approx(w[0]).epsilon(1e-15));
    CHECK(v[1] == doctest::Approx(w[1]).epsilon(1e-15));
    CHECK(lin_eps.mollification_width() == 0.3);
    CHECK(lin_eps.smooth());
}

TEST_CASE("closed-form mollification of the rough field matches direct quadrature") {
    const Drift b = Drift::rough(1, params(0.35, 1.0, 4, -0.4, 17));
    const Drift beps = mollify(b, 0.15);
    for (const double x0 : {-1.3, -0.2, 0.0, 0.8, 2.4}) {
        const Vec x{x0};
        const Vec closed = beps.eval(x);
        // High-fidelity quadrature: wide support so the Gaussian tail the
        // default radius drops (mass ~6e-5) stops being the error floor.
        const Vec quad = mollify_quadrature(b, 0.15, x, 129, 6.0);
        CHECK(closed[0] == doctest::Approx(quad[0]).epsilon(1e-6));
    }
    CHECK(beps.smooth());
    CHECK(beps.theta() == b.theta());
}

TEST_CASE("mollifying twice composes widths in quadrature") {
    const Drift b = Drift::rough(1, params(0.45, 0.8, 5, 0.2, 23));
    const Drift twice = mollify(mollify(b, 0.1), 0.2);
    const Drift once = mollify(b, std::hypot(0.1, 0.2));
    CHECK(twice.mollification_width() == doctest::Approx(once.mollification_width()).epsilon(1e-15));
    for (const double x0 : {-0.9, 0.1, 1.7}) {
        CHECK(twice.eval({x0})[0] == doctest::Approx(once.eval({x0})[0]).epsilon(1e-12));
    }
}

TEST_CASE("drift difference evaluates pointwise") {
    const Drift a = Drift::constant({2.0});
    const Drift b = Drift::rough(1, params(0.5, 1.0, 3, 0.0, 5));
    const VectorField diff = drift_difference(a, b);
    const Vec x{0.6};
    CHECK(diff(x)[0] == doctest::Approx(a.eval(x)[0] - b.eval(x)[0]).epsilon(1e-15));
}

TEST_CASE("Holder norm estimate recovers closed-form norms") {
    const Box box{1, 2.0};

    // Constant field: weighted sup at the origin, zero seminorm.
    const VectorField c = [](const Vec& x) {
        Vec v(x.dim());
        v[0] = 3.0;
        return v;
    };
    const HolderNorm hc = holder_norm_estimate(c, 1, box, 0.05, 0.5);
    CHECK(hc.weighted_sup == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(hc.seminorm == 0.0);

    // Identity field at theta = 1: quotient 1, weighted sup L/(1+L).
    const VectorField id = [](const Vec& x) { return x; };
    const HolderNorm hi = holder_norm_estimate(id, 1, box, 0.05, 1.0);
    CHECK(hi.weighted_sup == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(hi.seminorm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ladder depth does not inflate the Holder seminorm estimate") {
    // Rungs below the grid scale contribute geometrically small terms, so
    // doubling the ladder depth should leave the theta-seminorm essentially
    // flat; that is what makes the field C^theta rather than merely smooth.
    const Box box{1, 1.0};
    const double step = 0.002;
    const Drift shallow = Drift::rough(1, params(0.6, 1.0, 4, 0.0, 13));
    const Drift deep = Drift::rough(1, params(0.6, 1.0, 8, 0.0, 13));
    const double s4 = holder_norm_estimate(shallow, box, step, 0.6).seminorm;
    const double s8 = holder_norm_estimate(deep, box, step, 0.6).seminorm;
    CHECK(s8 <= 2.0 * s4);
    CHECK(s8 > 0.0);

    // The slope, by contrast, does blow up with depth: the field is not C^1
    // uniformly in the ladder, and the contrast between the two growth rates
    // is what "C^theta but not Lipschitz" means at finite resolution.
    const double lip4 = holder_norm_estimate(shallow, box, step, 1.0).seminorm;
    const double lip8 = holder_norm_estimate(deep, box, step, 1.0).seminorm;
    CHECK(lip8 > 1.8 * lip4);
    CHECK(s8 / s4 < 0.75 * lip8 / lip4);
}

TEST_CASE("mollification damps the fine rungs hardest") {
    // After mollifying at width eps, rungs with 2^k eps >> 1 are wiped out,
    // so the Lipschitz estimate of the mollified field stays bounded as the
    // ladder deepens.
    const Box box{1, 1.0};
    const double step = 0.002;
    const Drift deep = Drift::rough(1, params(0.35, 1.0, 8, 0.0, 13));
    const double lip_raw = holder_norm_estimate(deep, box, step, 1.0).seminorm;
    const double lip_eps = holder_norm_estimate(mollify(deep, 0.25), box, step, 1.0).seminorm;
    CHECK(lip_eps < 0.25 * lip_raw);
}
