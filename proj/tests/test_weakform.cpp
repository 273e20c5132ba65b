#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "stmc/weakform.hpp"

using namespace stmc;

namespace {

std::vector<double> dense_times(double horizon, int n_steps) {
    std::vector<double> times;
    for (int k = 0; k <= n_steps; ++k) times.push_back(horizon * k / n_steps);
    return times;
}

Drift mollified_rough(int dim) {
    Drift::RoughParams p;
    p.theta = 0.35;
    p.amplitude = 1.0;
    p.ladder_size = 5;
    p.tail_slope = -0.4;
    p.phase_seed = 7;
    return mollify(Drift::rough(dim, p), 0.1);
}

}  // namespace

TEST_CASE("bump test function has the frozen mass and exact derivatives") {
    const TestFunction phi(Vec{0.0}, 1.0);
    CHECK(phi.integral() == doctest::Approx(1.2069003224378762).epsilon(1e-15));
    CHECK(phi.value(Vec{0.0}) == 1.0);
    CHECK(phi.value(Vec{1.0}) == 0.0);
    CHECK(phi.value(Vec{1.5}) == 0.0);

    // Gradient against a central difference of the profile itself.
    const double d = 1e-6;
    const double fd =
        (phi.value(Vec{0.3 + d}) - phi.value(Vec{0.3 - d})) / (2 * d);
    CHECK(phi.gradient(Vec{0.3})[0] == doctest::Approx(fd).epsilon(1e-7));

    const double fd2 = (phi.value(Vec{0.3 + d}) - 2 * phi.value(Vec{0.3}) +
                        phi.value(Vec{0.3 - d})) / (d * d);
    CHECK(phi.laplacian(Vec{0.3}) == doctest::Approx(fd2).epsilon(1e-4));

    // Tensor product scaling in 2d.
    const TestFunction phi2(Vec{0.0, 0.0}, 0.5);
    CHECK(phi2.integral() ==
          doctest::Approx(0.5 * 1.2069003224378762 * 0.5 * 1.2069003224378762).epsilon(1e-14));
    CHECK(phi2.supported_in(Box{2, 3.0}));
    CHECK_FALSE(phi2.supported_in(Box{2, 1.5}));
}

TEST_CASE("frozen dynamics make every residual term traceable") {
    // Zero drift on the zero path: u(t) == u0, the drift and martingale
    // terms vanish, and the residual reduces to minus the Laplacian term.
    const Drift b = Drift::zero(1);
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.05);
    const BrownianPath still = zero_path(1.0, 32, 1);
    const TestFunction phi(Vec{0.0}, 0.5);
    const PathSolution sol = solve_characteristics(b, u0, still, dense_times(1.0, 32), grid);
    const ResidualSample r = ito_residual(sol, b, phi, 1.0);

    CHECK(r.drift_term == 0.0);
    CHECK(r.martingale_term == 0.0);
    CHECK(r.residual == -r.laplacian_term);

    // The Laplacian term has a closed form here: (t/2) int u0 lap(phi).
    double expect = 0.0;
    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
        const Vec x = grid.node(flat);
        expect += u0.f(x) * phi.laplacian(x);
    }
    expect *= 0.5 * grid.cell_volume();
    CHECK(r.laplacian_term == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("the residual is linear in the initial data pathwise") {
    const Drift b = mollified_rough(1);
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(3, 1.0, 32, 1);
    const TestFunction phi(Vec{0.0}, 0.5);
    const auto times = dense_times(1.0, 32);

    const InitialData ua = gaussian_bump(1, Vec{-0.4}, 0.6);
    const InitialData ub = cone(1, 1.0);
    InitialData combo;
    combo.name = "combo";
    combo.dim = 1;
    combo.f = [fa = ua.f, fb = ub.f](const Vec& x) { return 2.0 * fa(x) - 3.0 * fb(x); };
    combo.min_value = -3.0;
    combo.max_value = 2.0;

    const ResidualSample ra =
        ito_residual(solve_characteristics(b, ua, path, times, grid), b, phi, 1.0);
    const ResidualSample rb =
        ito_residual(solve_characteristics(b, ub, path, times, grid), b, phi, 1.0);
    const ResidualSample rc =
        ito_residual(solve_characteristics(b, combo, path, times, grid), b, phi, 1.0);

    CHECK(rc.residual ==
          doctest::Approx(2.0 * ra.residual - 3.0 * rb.residual).epsilon(1e-9));
    CHECK(rc.martingale_term ==
          doctest::Approx(2.0 * ra.martingale_term - 3.0 * rb.martingale_term).epsilon(1e-9));
}

TEST_CASE("residual report aggregates and ablation removes the Ito term") {
    ResidualReport report;
    report.samples.push_back({0, 1.0, 0.1, 0.0, 0.0, 0.5});
    report.samples.push_back({1, 1.0, -0.1, 0.0, 0.0, 0.5});
    CHECK(report.mean() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(report.mean_without_laplacian() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(report.std_error() > 0.0);

    std::stringstream out;
    report.write_csv(out);
    CHECK(out.str().rfind("path_index,t,residual,drift_term,martingale_term,laplacian_term", 0) ==
          0);
}

TEST_CASE("residual validates support and the stored time grid") {
    const Drift b = Drift::zero(1);
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(5, 1.0, 32, 1);
    const PathSolution dense = solve_characteristics(b, u0, path, dense_times(1.0, 32), grid);

    const TestFunction wide(Vec{0.0}, 1.0);  // support margin reaches 4 > 3
    CHECK_THROWS_WITH(ito_residual(dense, b, wide, 1.0),
                      doctest::Contains("phi support escapes the box margin"));

    const std::vector<double> sparse_times{0.0, 0.5, 1.0};
    const PathSolution sparse = solve_characteristics(b, u0, path, sparse_times, grid);
    const TestFunction phi(Vec{0.0}, 0.5);
    CHECK_THROWS_WITH(ito_residual(sparse, b, phi, 1.0),
                      doctest::Contains("every grid time"));
}

TEST_CASE("duality pairing collapses to the u0 integral") {
    const InitialData u0 = gaussian_bump(1, Vec{0.2}, 0.6);
    const UniformGrid grid(Box{1, 3.0}, 0.05);
    const TestFunction phi(Vec{0.0}, 0.5);
    const std::vector<double> times{0.0, 0.5, 1.0};

    // Zero drift: u(t, X_t(x)) = u0((x + B) - B), equal to u0(x) up to
    // cancellation roundoff, so the pairing equals the plain u0 integral.
    const Drift b = Drift::zero(1);
    const BrownianPath path = sample_path(6, 1.0, 64, 1);
    const PathSolution sol = solve_characteristics(b, u0, path, times, grid);

    double baseline = 0.0;
    for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
        const Vec x = grid.node(flat);
        baseline += u0.f(x) * phi.value(x);
    }
    baseline *= grid.cell_volume();

    for (const double t : times) {
        CHECK(duality_pairing(sol, b, phi, path, t) ==
              doctest::Approx(baseline).epsilon(1e-9));
    }
}

TEST_CASE("duality pairing vanishes identically for zero initial data") {
    InitialData zero_u0;
    zero_u0.name = "null";
    zero_u0.dim = 1;
    zero_u0.f = [](const Vec&) { return 0.0; };
    const Drift b = mollified_rough(1);
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(7, 1.0, 32, 1);
    const std::vector<double> times{0.0, 0.5, 1.0};
    const PathSolution sol = solve_characteristics(b, zero_u0, path, times, grid);
    const TestFunction phi(Vec{0.3}, 0.4);
    for (const double t : times) {
        CHECK(duality_pairing(sol, b, phi, path, t) == 0.0);
    }
}

TEST_CASE("duality pairing rejects a foreign path") {
    const Drift b = Drift::zero(1);
    const InitialData u0 = gaussian_bump(1, Vec{0.0}, 0.8);
    const UniformGrid grid(Box{1, 3.0}, 0.1);
    const BrownianPath path = sample_path(8, 1.0, 32, 1);
    const BrownianPath other = sample_path(9, 1.0, 32, 1);
    const std::vector<double> times{0.0, 1.0};
    const PathSolution sol = solve_characteristics(b, u0, path, times, grid);
    const TestFunction phi(Vec{0.0}, 0.5);
    CHECK_THROWS_WITH(duality_pairing(sol, b, phi, other, 1.0),
                      doctest::Contains("different path"));
}
