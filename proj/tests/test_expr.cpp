#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include <fdelab/expr.hpp>

using namespace fdelab;

TEST_CASE("basic expressions evaluate") {
    auto f = parse("sin(t)^2");
    CHECK(f(M_PI / 2) == Approx(1.0).margin(1e-15));
    CHECK(f(0.0) == Approx(0.0).margin(1e-15));

    auto g = parse("cos(sin(ln(1+t)))");
    CHECK(g(0.0) == Approx(1.0).margin(1e-15));

    auto h = parse("2*t + 3/2 - t^2");
    CHECK(h(2.0) == Approx(4 + 1.5 - 4));

    CHECK(parse("pi")(0.0) == Approx(M_PI));
    CHECK(parse("min(t, 2)")(5.0) == Approx(2.0));
    CHECK(parse("max(t, 2)")(5.0) == Approx(5.0));
    CHECK(parse("abs(-3 - t)")(1.0) == Approx(4.0));
    CHECK(parse("-t^2")(3.0) == Approx(-9.0));
    CHECK(parse("exp(t)/2")(1.0) == Approx(std::exp(1.0) / 2));
}

TEST_CASE("piecewise evaluation uses the right-continuous convention") {
    auto f = parse("piecewise [0,1): 0 ; [1,3*pi]: 2");
    CHECK(f(2.0) == Approx(2.0));
    CHECK(f(0.5) == Approx(0.0));
    CHECK(f(1.0) == Approx(2.0));     // right limit at the breakpoint
    CHECK(f(3 * M_PI) == Approx(2.0));
    CHECK(std::isnan(f(-0.1)));       // outside the declared domain
    CHECK(std::isnan(f(3 * M_PI + 0.1)));

    auto g = parse("piecewise [-inf, 0): 1 ; [0, inf]: t + 1");
    CHECK(g(-100.0) == Approx(1.0));
    CHECK(g(4.0) == Approx(5.0));
}

TEST_CASE("indicator node") {
    auto f = parse("2*ind(1, 2)");
    CHECK(f(1.5) == Approx(2.0));
    CHECK(f(1.0) == Approx(2.0));
    CHECK(f(2.0) == Approx(0.0));  // right-open
    CHECK(f(0.0) == Approx(0.0));
}

TEST_CASE("domain errors evaluate to NaN") {
    CHECK(std::isnan(parse("ln(t)")(-1.0)));
    CHECK(std::isnan(parse("ln(t)")(0.0)));
    CHECK(std::isnan(parse("t^0.5")(-2.0)));
}

TEST_CASE("parse errors carry source positions") {
    CHECK_THROWS_AS(parse("sin(t"), ParseError);
    CHECK_THROWS_AS(parse("2 +* t"), ParseError);
    CHECK_THROWS_AS(parse("bogus(t)"), ParseError);
    CHECK_THROWS_AS(parse("piecewise [1,0): t"), ParseError);
    CHECK_THROWS_AS(parse("piecewise [0,1): t ; [5,6]: t"), ParseError);
    CHECK_THROWS_AS(parse("piecewise [0,t): 1"), ParseError);

    try {
        parse("1 + bogus");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
}

namespace {

ExprPtr random_ast(std::mt19937_64& rng, int depth) {
    auto u = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    if (depth <= 0 || u() < 0.25) {
        if (u() < 0.5) return constant(std::round((u() * 20 - 10) * 16) / 16.0);
        return time_var();
    }
    switch (rng() % 10) {
        case 0: return add(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 1: return sub(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 2: return mul(random_ast(rng, depth - 1), random_ast(rng, depth - 1));
        case 3: return div(random_ast(rng, depth - 1), constant(1 + u()));
        case 4: return fdelab::pow(unary(ExprKind::Abs, random_ast(rng, depth - 1)),
                                   constant(double(1 + rng() % 3)));
        case 5: return unary(ExprKind::Sin, random_ast(rng, depth - 1));
        case 6: return unary(ExprKind::Cos, random_ast(rng, depth - 1));
        case 7: return unary(ExprKind::Exp, constant(u() * 2 - 1));
        case 8: return neg(random_ast(rng, depth - 1));
        default:
            return binary(u() < 0.5 ? ExprKind::Min : ExprKind::Max,
                          random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    }
}

}  // namespace

TEST_CASE("parser and printer round trip on random expressions") {
    std::mt19937_64 rng(20240521);
    for (int trial = 0; trial < 200; ++trial) {
        ExprPtr ast = random_ast(rng, 4);
        std::string text = print(ast);
        ExprPtr back;
        REQUIRE_NOTHROW(back = parse_expr(text));
        for (int i = 0; i <= 40; ++i) {
            double t = -4.0 + i * 0.2;
            double a = eval(ast, t), b = eval(back, t);
            if (std::isnan(a)) {
                CHECK(std::isnan(b));
            } else {
                CHECK(b == Approx(a).epsilon(1e-12).margin(1e-300));
            }
        }
    }
}

TEST_CASE("piecewise print round trip") {
    auto f = parse("piecewise [0, 1): t^2 ; [1, 2): 2 - t ; [2, 4]: sin(t)");
    auto g = parse(print(f));
    for (double t = 0.0; t <= 4.0; t += 0.01)
        CHECK(g(t) == Approx(f(t)).margin(1e-14));
    CHECK(print(parse(print(f))) == print(f));
}

TEST_CASE("piecewise round trip on random functions") {
    std::mt19937_64 rng(31);
    auto u = [&rng] { return double(rng() >> 11) * 0x1.0p-53; };
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> bks{u() * 2 - 1};
        std::vector<ExprPtr> pieces;
        const int m = 1 + int(rng() % 4);
        for (int i = 0; i < m; ++i) {
            bks.push_back(bks.back() + 0.25 + 2 * u());
            pieces.push_back(random_ast(rng, 3));
        }
        PiecewiseFn f(bks, pieces);
        PiecewiseFn g = parse(print(f));
        CHECK(print(g) == print(f));
        for (int i = 0; i <= 100; ++i) {
            double t = bks.front() + (bks.back() - bks.front()) * i / 100.0;
            double a = f(t), b = g(t);
            if (std::isnan(a)) CHECK(std::isnan(b));
            else CHECK(b == Approx(a).epsilon(1e-12).margin(1e-300));
        }
    }
}

TEST_CASE("positive part") {
    auto r = parse("cos(t)");
    auto rp = positive_part(r);
    CHECK(rp(M_PI) == Approx(0.0).margin(1e-15));
    CHECK(rp(0.0) == Approx(1.0));
    CHECK(positive_part(parse("-1"))(3.0) == Approx(0.0));
    auto s = parse("sin(t)^2");
    auto sp = positive_part(s);
    for (double t = 0; t < 7; t += 0.1) {
        CHECK(sp(t) >= 0.0);
        CHECK(sp(t) >= s(t));
        CHECK(sp(t) == Approx(s(t)));  // already nonnegative
    }
    // survives the printer
    auto reparsed = parse(print(rp));
    CHECK(reparsed(M_PI) == Approx(0.0).margin(1e-15));
}
