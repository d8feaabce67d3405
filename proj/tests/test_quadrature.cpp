#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include <fdelab/expr.hpp>
#include <fdelab/quadrature.hpp>

using namespace fdelab;

TEST_CASE("closed forms") {
    CHECK(quad(parse("sin(t)^2"), 0, M_PI) == Approx(M_PI / 2).margin(1e-10));
    CHECK(quad(parse("0"), 0, 1) == Approx(0.0).margin(1e-15));
    CHECK(quad(parse("exp(t)"), 0, 1) == Approx(std::exp(1.0) - 1).margin(1e-10));
    CHECK(quad(parse("1/(1+t^2)"), 0, 1) == Approx(M_PI / 4).margin(1e-10));
}

TEST_CASE("step integrand: breakpoints are panel edges") {
    // 2 * [t >= 1] over [0, 3*pi] has the exact integral 2*(3*pi - 1)
    auto c = parse("piecewise [0,1): 0 ; [1,3*pi]: 2");
    CHECK(quad(c, 0, 3 * M_PI) == Approx(2 * (3 * M_PI - 1)).margin(1e-10));
    // same through the indicator node (breakpoints unknown to quad)
    auto ci = parse("2*ind(1, 1000)");
    CHECK(quad(ci, 0, 3 * M_PI, 1e-9) == Approx(2 * (3 * M_PI - 1)).margin(1e-6));
}

TEST_CASE("non-integrable singularity exhausts the budget") {
    auto f = parse("1/t");
    CHECK_THROWS_AS(quad(f, 0, 1), QuadratureError);
}

TEST_CASE("additivity on random piecewise integrands") {
    std::mt19937_64 rng(7);
    auto u = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    const double tol = 1e-10;
    for (int trial = 0; trial < 25; ++trial) {
        double w1 = 0.3 + 2 * u(), w2 = 0.3 + 2 * u();
        std::vector<double> bks{0.0, w1, w1 + w2};
        std::vector<ExprPtr> pieces{
            add(constant(u() * 4 - 2), mul(constant(u() * 3), unary(ExprKind::Sin, mul(constant(1 + 3 * u()), time_var())))),
            sub(mul(constant(u() * 2), time_var()), constant(u())),
        };
        PiecewiseFn f(bks, pieces);
        double a = u() * 0.2, c = bks.back() - u() * 0.2;
        double b = a + (c - a) * u();
        double whole = quad(f, a, c, tol);
        double split = quad(f, a, b, tol) + quad(f, b, c, tol);
        CHECK(split == Approx(whole).margin(2 * tol));
    }
}

TEST_CASE("signed integral convention") {
    auto f = parse("t");
    CHECK(quad_signed(to_fn(f), 2, 0) == Approx(-2.0).margin(1e-10));
    CHECK(quad_signed(to_fn(f), 0, 2) == Approx(2.0).margin(1e-10));
}
