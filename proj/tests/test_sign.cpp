#define CATCH_CONFIG_MAIN
#include <catch2/catch.hpp>

#include <cmath>

#include <fdelab/expr.hpp>
#include <fdelab/sign.hpp>

using namespace fdelab;

TEST_CASE("sin(t/3) sign pattern over [0, 12*pi]") {
    auto f = parse("sin(t/3)");
    SignPattern p = find_sign_intervals(f, 0, 12 * M_PI, M_PI);
    REQUIRE(p.complete());
    CHECK(p.intervals[0].sign == -1);
    CHECK(p.intervals[0].lo == Approx(3 * M_PI).margin(1e-6));
    CHECK(p.intervals[0].hi == Approx(6 * M_PI).margin(1e-6));
    CHECK(p.intervals[1].sign == +1);
    CHECK(p.intervals[1].lo == Approx(6 * M_PI).margin(1e-6));
    CHECK(p.intervals[1].hi == Approx(9 * M_PI).margin(1e-6));
    // ordering s1 < t1 <= s2 < t2
    CHECK(p.intervals[0].lo < p.intervals[0].hi);
    CHECK(p.intervals[0].hi <= p.intervals[1].lo);
    CHECK(p.intervals[1].lo < p.intervals[1].hi);
    // margins are the attained sup of |f|
    CHECK(p.intervals[0].margin == Approx(1.0).margin(1e-3));
}

TEST_CASE("constant positive function yields an empty pattern") {
    auto f = parse("1");
    SignPattern p = find_sign_intervals(f, 0, 50, 1.0);
    CHECK(p.intervals.empty());
}

TEST_CASE("strictly positive forcing admits no nonpositive interval") {
    // cos(sin(ln(1+t))) >= cos(1) > 0, so no <= 0 interval exists
    auto f = parse("cos(sin(ln(1+t)))");
    SignPattern p = find_sign_intervals(f, 0, 100, 0.5);
    CHECK(p.intervals.empty());
    for (double t = 0; t <= 100; t += 0.25) CHECK(f(t) >= std::cos(1.0) - 1e-12);
}

TEST_CASE("claimed signs verified with slack on the grid") {
    auto f = parse("sin(t/3)");
    SignPattern p = find_sign_intervals(f, 0, 12 * M_PI, M_PI);
    REQUIRE(p.complete());
    for (const auto& iv : p.intervals) {
        for (int i = 0; i <= 500; ++i) {
            double t = iv.lo + (iv.hi - iv.lo) * i / 500.0;
            if (iv.sign < 0) CHECK(f(t) <= 1e-9);
            else CHECK(f(t) >= -1e-9);
        }
        CHECK(iv.margin >= 0.0);
    }
}

TEST_CASE("min_len filters short sign intervals") {
    // sin(t) - 0.9: <=0 stretches last ~5.38 per period, >=0 only ~0.9
    auto f = parse("sin(t) - 0.9");
    SignPattern empty = find_sign_intervals(f, 0, 40, 10.0);
    CHECK(empty.intervals.empty());

    SignPattern partial = find_sign_intervals(f, 0, 40, 4.0);
    CHECK(!partial.complete());
    REQUIRE(partial.intervals.size() == 1);  // long <=0 stretch, no >=0 of that length
    CHECK(partial.intervals[0].sign == -1);
    CHECK(partial.intervals[0].hi - partial.intervals[0].lo ==
          Approx(M_PI + 2 * std::asin(0.9)).margin(1e-3));

    SignPattern both = find_sign_intervals(f, 0, 40, 0.5);
    REQUIRE(both.complete());
    CHECK(both.intervals[1].sign == +1);
    CHECK(both.intervals[1].hi - both.intervals[1].lo ==
          Approx(M_PI - 2 * std::asin(0.9)).margin(1e-3));
}
