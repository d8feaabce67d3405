#pragma once

// Numerical verification of the Riccati comparison results: the scalar
// two-equation ordering (integral hypothesis + y1 >= y0) and the functional
// orderings between the forced Riccati equation and its homogeneous
// comparison counterpart.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "riccati.hpp"
#include "verdict.hpp"

namespace fdelab {

// Coefficient triples (a,b,c), (a1,b1,c1) of the scalar Riccati pair
//   y' + a y^2 + b y + c = 0,   y' + a1 y^2 + b1 y + c1 = 0
// with initial data for the solution y0 and the inequality solutions
// eta0, eta1. eta0 and eta1 are realized as solutions of the linear
// truncations eta' + b eta + c = 0 (resp. b1, c1), which solve the
// differential inequalities whenever a >= 0 (resp. a1 >= 0).
struct ScalarRiccatiPair {
    PiecewiseFn a, b, c;
    PiecewiseFn a1, b1, c1;
    double t1 = 0, t2 = 1;
    double y0_init = 0;
    double eta0_init = 0;
    double eta1_init = 0;
    double lambda = 0;
};

struct ComparisonReport {
    std::vector<HypothesisCheck> conditions;
    double margin = kNaN;     // min of the asserted ordering gap over the span
    double margin_at = kNaN;
    bool conclusion = false;  // margin within -tol of the asserted ordering
    double span_end = kNaN;   // end of the span both sides reached
    std::optional<BlowUpRecord> blowup_given;      // the hypothesis-side solution
    std::optional<BlowUpRecord> blowup_concluded;  // the asserted-side solution

    const HypothesisCheck* find(const std::string& id) const {
        for (const auto& c : conditions)
            if (c.id == id) return &c;
        return nullptr;
    }
};

// Theorem-2.1-style check: integrate y0, the linear eta's, the accumulated
// integral hypothesis, and y1 from y1(t1) = eta1(t1); report the hypothesis
// on a 256-point grid and the pointwise ordering margin min(y1 - y0).
inline ComparisonReport verify_scalar_comparison(const ScalarRiccatiPair& pair,
                                                 double tol = 1e-8) {
    ComparisonReport rep;
    const double t1 = pair.t1, t2 = pair.t2;
    if (!(t2 > t1)) throw std::invalid_argument("scalar comparison: needs t2 > t1");

    rep.conditions.push_back(check_nonnegative(
        "a1-nonnegative", [&pair](double t) { return pair.a1(t); }, t1, t2));
    {
        HypothesisCheck c = check_nonnegative(
            "a-nonnegative", [&pair](double t) { return pair.a(t); }, t1, t2);
        c.note = "required for the linear realization of eta0 to solve the inequality";
        rep.conditions.push_back(c);
    }
    {
        HypothesisCheck c;
        c.id = "initial-order";
        c.margin = std::fmin(pair.eta0_init - pair.y0_init, pair.eta1_init - pair.y0_init);
        c.worst_point = t1;
        c.status = c.margin >= -kGridSlack ? CheckStatus::Verified : CheckStatus::Violated;
        rep.conditions.push_back(c);
    }
    {
        HypothesisCheck c;
        c.id = "lambda-range";
        c.margin = std::fmin(pair.lambda - pair.y0_init, pair.eta1_init - pair.lambda);
        c.worst_point = t1;
        c.status = c.margin >= -kGridSlack ? CheckStatus::Verified : CheckStatus::Violated;
        rep.conditions.push_back(c);
    }

    // states: y0, eta0, eta1, w, I, y1
    auto rhs = [&pair](double t, const std::array<double, 6>& s, std::array<double, 6>& d) {
        const double a = pair.a(t), b = pair.b(t), c = pair.c(t);
        const double a1 = pair.a1(t), b1 = pair.b1(t), c1 = pair.c1(t);
        d[0] = -(a * s[0] * s[0] + b * s[0] + c);
        d[1] = -(b * s[1] + c);
        d[2] = -(b1 * s[2] + c1);
        d[3] = a1 * (s[1] + s[2]) + b1;
        d[4] = std::exp(s[3]) * ((a - a1) * s[0] * s[0] + (b - b1) * s[0] + (c - c1));
        d[5] = -(a1 * s[5] * s[5] + b1 * s[5] + c1);
    };

    std::vector<double> mesh;
    for (const PiecewiseFn* f : {&pair.a, &pair.b, &pair.c, &pair.a1, &pair.b1, &pair.c1})
        for (double bp : f->finite_breakpoints())
            if (bp > t1 && bp < t2) mesh.push_back(bp);
    std::sort(mesh.begin(), mesh.end());

    rk::Options<6> ropt;
    ropt.tol = 1e-10;
    ropt.stop = [](double, const std::array<double, 6>& s, double) {
        return std::fabs(s[0]) > 1e8 || std::fabs(s[5]) > 1e8;
    };

    std::vector<rk::DenseStep<6>> steps;
    const std::array<double, 6> s0{pair.y0_init, pair.eta0_init, pair.eta1_init,
                                   0.0, 0.0, pair.eta1_init};
    auto res = rk::integrate<6>(rhs, t1, t2, s0, mesh, steps, ropt);
    rep.span_end = res.t_end;
    if (res.outcome != rk::Outcome::ReachedEnd) {
        BlowUpRecord b{res.t_end, 0};
        if (std::fabs(res.y_end[0]) > 1e6) {
            b.direction = res.y_end[0] > 0 ? +1 : -1;
            rep.blowup_given = b;
        }
        if (std::fabs(res.y_end[5]) > 1e6) {
            b.direction = res.y_end[5] > 0 ? +1 : -1;
            rep.blowup_concluded = b;
        }
    }

    auto at = [&steps](std::size_t comp, double t) {
        const auto* ds = rk::locate_step(steps, t);
        return ds ? ds->value(comp, t) : kNaN;
    };

    if (!steps.empty()) {
        HypothesisCheck hyp;
        hyp.id = "integral-hypothesis";
        double worst = kInf, worst_t = t1;
        const int n = 256;
        for (int i = 0; i <= n; ++i) {
            const double t = t1 + (rep.span_end - t1) * double(i) / double(n);
            const double v = pair.lambda - pair.y0_init + at(4, t);
            if (v < worst) { worst = v; worst_t = t; }
        }
        hyp.margin = worst;
        hyp.worst_point = worst_t;
        hyp.status = worst >= -1e-10 ? CheckStatus::Verified : CheckStatus::Violated;
        rep.conditions.push_back(hyp);

        double margin = kInf, margin_at = t1;
        for (int i = 0; i <= n; ++i) {
            const double t = t1 + (rep.span_end - t1) * double(i) / double(n);
            const double gap = at(5, t) - at(0, t);
            if (gap < margin) { margin = gap; margin_at = t; }
        }
        rep.margin = margin;
        rep.margin_at = margin_at;
        rep.conclusion = margin >= -tol;
    }
    return rep;
}

enum class ComparisonMode { Lemma22, Lemma23 };

struct FunctionalComparisonInput {
    EquationSpec eq;              // coefficients r_j, arguments alpha_j, and f
    std::vector<PiecewiseFn> r1;  // comparison coefficients, same alpha_j
    double lambda = 1;
    PiecewiseFn gamma;            // past of the solution the lemma produces
    double t1 = 0, t2 = 1;
    double past_gap = 1.0;        // reference past = gamma - past_gap
};

namespace detail {

inline PiecewiseFn offset_by(const PiecewiseFn& f, double delta) {
    std::vector<ExprPtr> pieces;
    pieces.reserve(f.piece_count());
    for (std::size_t i = 0; i < f.piece_count(); ++i)
        pieces.push_back(add(f.piece(i), constant(delta)));
    return PiecewiseFn(f.bounds(), pieces);
}

inline bool identity_at(const PiecewiseFn& alpha, double t) {
    return std::fabs(alpha(t) - t) <= 1e-12 * std::fmax(1.0, std::fabs(t));
}

}  // namespace detail

// Lemma-2.2 / 2.3 style functional comparison. In Lemma22 mode the reference
// y1 solves the homogeneous comparison equation with past gamma - past_gap
// and the asserted solution y of the forced equation has past gamma; the
// ordering y > y1 is reported. Lemma23 mode mirrors the roles (reference y of
// the forced equation below, asserted y1 of the comparison equation above).
inline ComparisonReport verify_functional_comparison(const FunctionalComparisonInput& in,
                                                     ComparisonMode mode, double tol = 1e-8) {
    if (in.r1.size() != in.eq.terms.size())
        throw std::invalid_argument("functional comparison: r1 count must match equation terms");
    if (in.lambda == 0) throw std::invalid_argument("functional comparison: lambda nonzero");

    ComparisonReport rep;
    const double t1 = in.t1, t2 = in.t2;
    const bool l22 = mode == ComparisonMode::Lemma22;

    // conditions 1)/1'), 2)/2'), 3)/3')
    for (std::size_t j = 0; j < in.eq.terms.size(); ++j) {
        const auto& rj = in.eq.terms[j].r;
        const auto& r1j = in.r1[j];
        auto gap = [&](double t) { return l22 ? r1j(t) - rj(t) : rj(t) - r1j(t); };
        HypothesisCheck c = check_nonnegative(
            (l22 ? std::string("1") : std::string("1'")) + "/term" + std::to_string(j), gap, t1, t2);
        rep.conditions.push_back(c);
    }
    for (std::size_t j = 0; j < in.eq.terms.size(); ++j) {
        const auto& rj = in.eq.terms[j].r;
        const auto& r1j = in.r1[j];
        const auto& alpha = in.eq.terms[j].alpha;
        HypothesisCheck c;
        c.id = (l22 ? std::string("2") : std::string("2'")) + "/term" + std::to_string(j);
        c.status = CheckStatus::Verified;
        c.margin = 0;
        const long n = std::lround(std::ceil((t2 - t1) / kGridStep));
        for (long i = 0; i <= n; ++i) {
            const double t = t1 + (t2 - t1) * double(i) / double(n);
            const double lower = l22 ? rj(t) : r1j(t);   // "if lower coefficient is negative"
            const double other = l22 ? r1j(t) : rj(t);   // "...the other must be nonnegative"
            if (lower < -kGridSlack && other < -kGridSlack && !detail::identity_at(alpha, t)) {
                c.status = CheckStatus::Violated;
                c.worst_point = t;
                c.margin = other;
                break;
            }
        }
        rep.conditions.push_back(c);
    }
    {
        auto g = [&in, l22](double t) {
            const double v = in.eq.f(t) / in.lambda;
            return l22 ? v : -v;
        };
        HypothesisCheck c = check_nonnegative(l22 ? "3" : "3'", g, t1, t2);
        c.note = l22 ? "f/lambda >= 0" : "f/lambda <= 0";
        rep.conditions.push_back(c);
    }

    // integrate both sides
    EquationSpec cmp = in.eq;
    for (std::size_t j = 0; j < cmp.terms.size(); ++j) cmp.terms[j].r = in.r1[j];

    RiccatiProblem above, below;  // ordering: above > below is asserted
    if (l22) {
        above = RiccatiProblem{in.eq, in.lambda, t1, in.gamma, false};
        below = RiccatiProblem{cmp, in.lambda, t1, detail::offset_by(in.gamma, -in.past_gap), true};
    } else {
        above = RiccatiProblem{cmp, in.lambda, t1, in.gamma, true};
        below = RiccatiProblem{in.eq, in.lambda, t1, detail::offset_by(in.gamma, -in.past_gap), false};
    }

    RiccatiTrajectory ya = solve_riccati(above, t2);
    RiccatiTrajectory yb = solve_riccati(below, t2);
    // the reference (hypothesis) solution is the "below" one in Lemma22 mode,
    // the "below" (forced) one in Lemma23 mode as well
    rep.blowup_given = yb.blowup();
    rep.blowup_concluded = ya.blowup();
    {
        HypothesisCheck c;
        c.id = "reference-exists";
        c.status = yb.reached_horizon() ? CheckStatus::Verified : CheckStatus::Violated;
        if (yb.blowup()) c.worst_point = yb.blowup()->t_escape;
        c.note = "the given solution of the reference equation must live on the interval";
        rep.conditions.push_back(c);
    }

    const double span = std::fmin(ya.t_end(), yb.t_end());
    rep.span_end = span;
    if (span > t1) {
        double margin = kInf, margin_at = t1;
        const int n = 512;
        for (int i = 0; i <= n; ++i) {
            const double t = t1 + (span - t1) * double(i) / double(n);
            const double gap = ya.y(t) - yb.y(t);
            if (gap < margin) { margin = gap; margin_at = t; }
        }
        rep.margin = margin;
        rep.margin_at = margin_at;
        rep.conclusion = margin > -tol;
    }
    return rep;
}

}  // namespace fdelab
