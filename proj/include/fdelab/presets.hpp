#pragma once

// Bundled reference scenarios, selectable by id from configs and the CLI.
//
//  "3.1" - forced equation with trigonometric coefficients, two constant
//          delays and an undelayed negative term; compared against its
//          homogeneous counterpart, which has the constant witness phi == 1.
//  "3.2" - step-coefficient delay equation forced by sin(t/3); the interval
//          partition for the period-l comparison instance ships as a formula.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "criteria.hpp"
#include "expr.hpp"
#include "integrator.hpp"

namespace fdelab::presets {

// 0 on [3*pi*l, 3*pi*l + 1), `height` on [3*pi*l + 1, 3*pi*(l+1)), for
// l = 0..periods-1.
inline PiecewiseFn step_coefficient(double height, int periods) {
    std::vector<double> bks;
    std::vector<ExprPtr> pieces;
    for (int l = 0; l < periods; ++l) {
        const double base = 3 * M_PI * l;
        bks.push_back(base);
        pieces.push_back(constant(0.0));
        bks.push_back(base + 1.0);
        pieces.push_back(constant(height));
    }
    bks.push_back(3 * M_PI * periods);
    return PiecewiseFn(std::move(bks), std::move(pieces));
}

struct Scenario31 {
    EquationSpec eq;              // the forced equation
    std::vector<PiecewiseFn> r1;  // comparison coefficients (equal to r_j)
    PiecewiseFn witness;          // phi == 1 solves the comparison equation
    HistorySpec history;          // produces a numerically zero-free solution
    double window_lo = 0, window_hi = 100;
    double horizon = 300;
};

inline Scenario31 scenario_31() {
    Scenario31 s;
    s.eq.p = parse("1");
    s.eq.q = parse("0");
    s.eq.f = parse("cos(sin(ln(1+t)))");
    s.eq.terms.push_back({parse("sin(t)^2"), parse("t - 1")});
    s.eq.terms.push_back({parse("cos(t)^2"), parse("t - 2")});
    s.eq.terms.push_back({parse("-1"), parse("t")});
    s.eq.t0 = 0;
    for (const auto& term : s.eq.terms) s.r1.push_back(term.r);
    s.witness = parse("1");
    s.history = HistorySpec{0, parse("1"), 0.0};
    return s;
}

struct Scenario32 {
    EquationSpec eq;              // step-coefficient delay equation, f = sin(t/3)
    std::vector<PiecewiseFn> r1;  // comparison coefficients (equal to c_1)
    double window_lo = 0, window_hi = 30 * M_PI;
    double delay = 0.5;
    double coefficient_height = 2.0;
};

// The deviating argument is t - 1/2 and the coefficient is the 2-level step;
// `periods` controls how far the step coefficient is laid out.
inline Scenario32 scenario_32(int periods = 12, double height = 2.0) {
    Scenario32 s;
    s.coefficient_height = height;
    s.eq.p = parse("1");
    s.eq.q = parse("0");
    s.eq.f = parse("sin(t/3)");
    s.eq.terms.push_back({step_coefficient(height, periods), parse("t - 1/2")});
    s.eq.t0 = 0;
    s.r1.push_back(s.eq.terms[0].r);
    return s;
}

// Partition formula for the period containing the sign interval [s, t]:
// t1 = 3*pi*l + 1/2, t2 = (3l+2)*pi + 1/2, t3 = (3l+2)*pi + 1, t4 = 3*pi*(l+1).
inline std::array<double, 4> partition_32(double s, double t) {
    (void)t;
    const long l = std::lround(s / (3 * M_PI));
    const double base = 3 * M_PI * double(l);
    return {base + 0.5, base + 2 * M_PI + 0.5, base + 2 * M_PI + 1.0, base + 3 * M_PI};
}

inline IntervalOscInstance interval_instance_32(int l, double height = 2.0) {
    Scenario32 s = scenario_32(std::max(12, l + 2), height);
    auto part = partition_32(3 * M_PI * l + 0.5, 0);
    std::vector<BetaTerm> terms;
    for (const auto& term : s.eq.terms) terms.push_back(BetaTerm{term.r, term.alpha});
    return analyze_interval_instance(s.eq.p, std::move(terms), part[0], part[1], part[2], part[3]);
}

// Variational-test scenario: d = r = 1 with the sign-patterned forcing sin t.
struct ScenarioWong {
    PiecewiseFn d, r, g;
    double window_lo = 0, window_hi = 4 * M_PI;
};

inline ScenarioWong scenario_wong() {
    ScenarioWong s;
    s.d = parse("1");
    s.r = parse("1");
    s.g = parse("sin(t)");
    return s;
}

}  // namespace fdelab::presets
