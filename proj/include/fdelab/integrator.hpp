#pragma once

// Cauchy problems for the second order linear functional-differential
// equation
//
//   (p(t) phi'(t))' + q(t) phi'(t) + sum_j r_j(t) phi(alpha_j(t)) = f(t)
//
// solved by the method of steps on the equivalent first order system
// phi' = psi/p, psi' = -sum_j r_j phi(alpha_j) - (q/p) psi + f, with
// delay-induced derivative discontinuities inserted as hard mesh points and
// delayed values read from the continuous extension of the running solution.
// Also provides plain second order ODE solves on an interval and the
// conjugate-point scan used by interval-oscillation checks.

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "expr.hpp"
#include "quadrature.hpp"
#include "rk.hpp"
#include "trajectory.hpp"

namespace fdelab {

class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& msg, double where)
        : std::runtime_error(msg + " at t = " + detail::fmt_double(where)), where_(where) {}
    double where() const { return where_; }

  private:
    double where_ = 0;
};

struct DelayTerm {
    PiecewiseFn r;      // coefficient r_j
    PiecewiseFn alpha;  // deviating argument alpha_j, alpha_j(t) <= t
};

struct EquationSpec {
    PiecewiseFn p;  // > 0
    PiecewiseFn q;
    PiecewiseFn f;
    std::vector<DelayTerm> terms;
    double t0 = 0;

    // Sampled invariant check over [t0, hi]: p > 0 and alpha_j(t) <= t.
    void validate(double hi, double grid_step = 1e-2) const {
        const double lo = t0;
        const long n = std::max(2L, std::lround((hi - lo) / grid_step));
        for (long i = 0; i <= n; ++i) {
            const double t = lo + (hi - lo) * double(i) / double(n);
            if (!(p(t) > 0))
                throw std::invalid_argument("equation: p(t) must be positive, fails at t = " +
                                            detail::fmt_double(t));
            for (const auto& term : terms) {
                const double a = term.alpha(t);
                if (!(a <= t + 1e-9 * std::fmax(1.0, std::fabs(t))))
                    throw std::invalid_argument(
                        "equation: alpha(t) <= t violated at t = " + detail::fmt_double(t));
            }
        }
    }
};

struct HistorySpec {
    double t1 = 0;      // handoff point, >= t0
    PiecewiseFn theta;  // phi(t) for t <= t1
    double zeta = 0;    // phi'(t1)
};

struct IntegratorOptions {
    double tol = 1e-9;
    double zero_tol = 0;      // 0 = auto: 1e-10 * max(1, running max |phi|)
    int max_disc_order = 3;   // depth of the delay discontinuity tree
    double h_max = 0;
};

namespace detail {

inline bool nearly_equal(double a, double b, double rel = 1e-12) {
    return std::fabs(a - b) <= rel * std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
}

inline void sorted_unique(std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end(),
                        [](double a, double b) { return nearly_equal(a, b); }),
            v.end());
}

// Does alpha(t) - t vanish (to rounding) across the whole span?
inline bool is_identity_argument(const PiecewiseFn& alpha, double lo, double hi) {
    const int n = 257;
    for (int i = 0; i < n; ++i) {
        const double t = lo + (hi - lo) * double(i) / double(n - 1);
        if (std::fabs(alpha(t) - t) > 1e-12 * std::fmax(1.0, std::fabs(t))) return false;
    }
    return true;
}

// All solutions of alpha(t) = target on (lo, hi), located by a sign-change
// scan plus bisection.
inline std::vector<double> preimages(const PiecewiseFn& alpha, double target,
                                     double lo, double hi, int scan_points = 4096) {
    std::vector<double> out;
    if (!(hi > lo)) return out;
    const int n = std::min(scan_points, 1 << 22);
    double prev_t = lo, prev_g = alpha(lo) - target;
    for (int i = 1; i <= n; ++i) {
        const double t = lo + (hi - lo) * double(i) / double(n);
        const double g = alpha(t) - target;
        if (std::isfinite(prev_g) && std::isfinite(g) && prev_g * g <= 0.0 && (prev_g != 0 || g != 0)) {
            double a = prev_t, b = t, ga = prev_g;
            for (int it = 0; it < 80 && b - a > 1e-13 * std::fmax(1.0, std::fabs(b)); ++it) {
                const double m = 0.5 * (a + b);
                const double gm = alpha(m) - target;
                if (ga * gm <= 0) b = m; else { a = m; ga = gm; }
            }
            out.push_back(0.5 * (a + b));
        }
        prev_t = t;
        prev_g = g;
    }
    sorted_unique(out);
    return out;
}

}  // namespace detail

// Hard mesh for the method of steps: coefficient breakpoints plus the delay
// discontinuity tree seeded at t1 (and at the history's own breakpoints),
// propagated through the deviating arguments up to the configured order.
inline std::vector<double> build_integration_mesh(const EquationSpec& eq, const HistorySpec& hist,
                                                  double horizon, int max_disc_order = 3) {
    std::vector<double> mesh;
    auto add_range = [&](const std::vector<double>& pts) {
        for (double b : pts)
            if (b > hist.t1 && b < horizon) mesh.push_back(b);
    };
    add_range(eq.p.finite_breakpoints());
    add_range(eq.q.finite_breakpoints());
    add_range(eq.f.finite_breakpoints());
    for (const auto& term : eq.terms) {
        add_range(term.r.finite_breakpoints());
        add_range(term.alpha.finite_breakpoints());
    }

    // seed the discontinuity tree
    std::vector<double> level{hist.t1};
    for (double b : hist.theta.finite_breakpoints())
        if (b <= hist.t1) level.push_back(b);

    for (int depth = 1; depth <= max_disc_order; ++depth) {
        std::vector<double> next;
        for (const auto& term : eq.terms) {
            if (detail::is_identity_argument(term.alpha, hist.t1, horizon)) continue;
            for (double s : level) {
                auto roots = detail::preimages(term.alpha, s, hist.t1, horizon);
                next.insert(next.end(), roots.begin(), roots.end());
            }
        }
        detail::sorted_unique(next);
        add_range(next);
        level = std::move(next);
        if (level.empty()) break;
    }
    detail::sorted_unique(mesh);
    return mesh;
}

namespace detail {

struct DdeContext {
    const EquationSpec* eq = nullptr;
    const HistorySpec* hist = nullptr;
    std::vector<rk::DenseStep<2>>* steps = nullptr;
    std::vector<bool> identity_term;

    double phi_at(double a) const {
        if (a <= hist->t1) {
            const double v = hist->theta(a);
            if (!std::isfinite(v))
                throw IntegrationError("history not defined far enough left", a);
            return v;
        }
        const auto* ds = rk::locate_step(*steps, a);
        if (!ds) throw IntegrationError("delayed argument precedes computed span", a);
        return ds->value(0, a);
    }
};

}  // namespace detail

// Solve the Cauchy problem phi(t) = theta(t) for t <= t1, phi'(t1) = zeta,
// integrating the first order system to `horizon`.
inline Trajectory solve_cauchy(const EquationSpec& eq, const HistorySpec& hist, double horizon,
                               IntegratorOptions opt = {}) {
    if (!(hist.t1 >= eq.t0)) throw std::invalid_argument("solve_cauchy: t1 must be >= t0");
    if (!(horizon >= hist.t1)) throw std::invalid_argument("solve_cauchy: horizon must be >= t1");

    if (horizon == hist.t1) return Trajectory({}, {}, true, horizon);

    auto steps = std::make_shared<std::vector<rk::DenseStep<2>>>();
    detail::DdeContext ctx;
    ctx.eq = &eq;
    ctx.hist = &hist;
    ctx.steps = steps.get();
    for (const auto& term : eq.terms)
        ctx.identity_term.push_back(detail::is_identity_argument(term.alpha, hist.t1, horizon));

    // history must reach the leftmost deviating-argument image
    double theta_lo = hist.theta.domain_lo();
    if (std::isfinite(theta_lo)) {
        for (std::size_t j = 0; j < eq.terms.size(); ++j) {
            if (ctx.identity_term[j]) continue;
            const int n = 512;
            for (int i = 0; i <= n; ++i) {
                const double t = hist.t1 + (horizon - hist.t1) * double(i) / double(n);
                const double a = eq.terms[j].alpha(t);
                if (a <= hist.t1 && a < theta_lo - 1e-12 * std::fmax(1.0, std::fabs(theta_lo)))
                    throw IntegrationError("history not defined far enough left", a);
            }
        }
    }

    const bool has_delay =
        std::any_of(ctx.identity_term.begin(), ctx.identity_term.end(), [](bool b) { return !b; });

    auto rhs = [&ctx](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        const EquationSpec& eq = *ctx.eq;
        const double pt = eq.p(t);
        dy[0] = y[1] / pt;
        double s = eq.f(t) - eq.q(t) / pt * y[1];
        for (std::size_t j = 0; j < eq.terms.size(); ++j) {
            const double rj = eq.terms[j].r(t);
            if (rj == 0.0) continue;
            const double phi_a =
                ctx.identity_term[j] ? y[0] : ctx.phi_at(eq.terms[j].alpha(t));
            s -= rj * phi_a;
        }
        dy[1] = s;
    };

    rk::Options<2> ropt;
    ropt.tol = opt.tol;
    ropt.h_max = opt.h_max;
    if (has_delay) {
        ropt.step_cap = [&ctx, &eq, &hist](double t, double h) {
            static constexpr double stages[] = {0.2, 0.3, 0.8, 8.0 / 9.0, 1.0};
            const double slack = 1e-12 * std::fmax(1.0, std::fabs(t));
            auto good = [&](double hh) {
                for (double c : stages) {
                    const double tau = t + c * hh;
                    for (std::size_t j = 0; j < eq.terms.size(); ++j) {
                        if (ctx.identity_term[j]) continue;
                        if (eq.terms[j].alpha(tau) > t + slack) return false;
                    }
                }
                return true;
            };
            if (good(h)) return h;
            // quick guess: current delay, exact for constant lags
            double guess = h;
            for (std::size_t j = 0; j < eq.terms.size(); ++j)
                if (!ctx.identity_term[j]) guess = std::fmin(guess, t - eq.terms[j].alpha(t));
            if (guess > 0 && guess < h && good(guess)) return guess;
            double lo = 0, hi = h;
            for (int i = 0; i < 50; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (good(mid)) lo = mid; else hi = mid;
            }
            (void)hist;
            return lo;
        };
    }

    const std::array<double, 2> y0{hist.theta(hist.t1), eq.p(hist.t1) * hist.zeta};
    if (!std::isfinite(y0[0]))
        throw IntegrationError("history not evaluable at t1", hist.t1);

    const auto mesh = build_integration_mesh(eq, hist, horizon, opt.max_disc_order);
    auto res = rk::integrate<2>(rhs, hist.t1, horizon, y0, mesh, *steps, ropt);
    if (res.outcome == rk::Outcome::StepUnderflow)
        throw IntegrationError("step size underflow", res.t_end);

    std::vector<TrajectorySegment> segs;
    segs.reserve(steps->size());
    for (std::size_t i = 0; i < steps->size(); ++i) {
        auto ds = std::shared_ptr<const rk::DenseStep<2>>(steps, &(*steps)[i]);
        TrajectorySegment s;
        s.t_begin = ds->t0;
        s.t_end = ds->t0 + ds->h;
        s.phi = [ds](double t) { return ds->value(0, t); };
        s.psi = [ds](double t) { return ds->value(1, t); };
        s.dphi = [ds](double t) { return ds->derivative(0, t); };
        s.dpsi = [ds](double t) { return ds->derivative(1, t); };
        segs.push_back(std::move(s));
    }
    std::vector<double> full_mesh = mesh;
    full_mesh.insert(full_mesh.begin(), hist.t1);
    full_mesh.push_back(horizon);

    Trajectory traj(std::move(segs), std::move(full_mesh),
                    res.outcome == rk::Outcome::ReachedEnd, horizon);
    PiecewiseFn theta_copy = hist.theta;
    traj.set_history([theta_copy](double t) { return theta_copy(t); });
    detect_zeros(traj, opt.zero_tol);
    return traj;
}

// Dense solution of (p phi')' + q phi' + r phi = 0 on [a, b] with
// phi(a) = ic_value, phi'(a) = ic_slope. Coefficients arrive as plain
// callables-with-breakpoints, so numerically built comparison coefficients
// integrate through the same path as parsed expressions.
inline Trajectory solve_ode_interval_fn(const ScalarFn& p, const ScalarFn& q, const ScalarFn& r,
                                        double a, double b, double ic_value, double ic_slope,
                                        IntegratorOptions opt = {}) {
    if (!(b >= a)) throw std::invalid_argument("solve_ode_interval: needs b >= a");
    if (a == b) return Trajectory({}, {}, true, b);

    auto rhs = [&p, &q, &r](double t, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        const double pt = p(t);
        dy[0] = y[1] / pt;
        dy[1] = -r(t) * y[0] - q(t) / pt * y[1];
    };
    std::vector<double> mesh;
    for (const ScalarFn* f : {&p, &q, &r})
        for (double bp : f->breakpoints)
            if (bp > a && bp < b) mesh.push_back(bp);
    detail::sorted_unique(mesh);

    rk::Options<2> ropt;
    ropt.tol = opt.tol;
    ropt.h_max = opt.h_max;
    auto steps = std::make_shared<std::vector<rk::DenseStep<2>>>();
    const std::array<double, 2> y0{ic_value, p(a) * ic_slope};
    auto res = rk::integrate<2>(rhs, a, b, y0, mesh, *steps, ropt);
    if (res.outcome == rk::Outcome::StepUnderflow)
        throw IntegrationError("step size underflow", res.t_end);

    std::vector<TrajectorySegment> segs;
    segs.reserve(steps->size());
    for (std::size_t i = 0; i < steps->size(); ++i) {
        auto ds = std::shared_ptr<const rk::DenseStep<2>>(steps, &(*steps)[i]);
        TrajectorySegment s;
        s.t_begin = ds->t0;
        s.t_end = ds->t0 + ds->h;
        s.phi = [ds](double t) { return ds->value(0, t); };
        s.psi = [ds](double t) { return ds->value(1, t); };
        s.dphi = [ds](double t) { return ds->derivative(0, t); };
        s.dpsi = [ds](double t) { return ds->derivative(1, t); };
        segs.push_back(std::move(s));
    }
    Trajectory traj(std::move(segs), std::move(mesh),
                    res.outcome == rk::Outcome::ReachedEnd, b);
    detect_zeros(traj, opt.zero_tol);
    return traj;
}

inline Trajectory solve_ode_interval_q(const PiecewiseFn& p, const PiecewiseFn& q,
                                       const PiecewiseFn& r, double a, double b,
                                       double ic_value, double ic_slope,
                                       IntegratorOptions opt = {}) {
    return solve_ode_interval_fn(to_fn(p), to_fn(q), to_fn(r), a, b, ic_value, ic_slope, opt);
}

inline Trajectory solve_ode_interval(const PiecewiseFn& p, const PiecewiseFn& r, double a, double b,
                                     double ic_value, double ic_slope, IntegratorOptions opt = {}) {
    return solve_ode_interval_q(p, PiecewiseFn(constant(0.0)), r, a, b, ic_value, ic_slope, opt);
}

struct ConjugateWitness {
    double tau1 = 0, tau2 = 0;
};

// Interval oscillation of (p phi')' + q phi' + r phi = 0 on [a, b] in the
// sense that every solution vanishes there: scan start points tau1, launch
// the solution with phi(tau1) = 0, phi'(tau1) = 1 and look for its next zero
// tau2 <= b. Any conjugate pair found certifies (Sturm separation); an
// exhausted scan is only evidence of the negative.
inline std::pair<bool, ConjugateWitness> interval_oscillatory_fn(
    const ScalarFn& p, const ScalarFn& q, const ScalarFn& r, double a, double b,
    double scan_step = 0, IntegratorOptions opt = {}) {
    if (!(b > a)) return {false, {}};
    if (scan_step <= 0) scan_step = (b - a) / 64.0;
    const double end_slack = 1e-12 * std::fmax(1.0, std::fabs(b));
    for (double tau1 = a; tau1 < b - scan_step * 0.5; tau1 += scan_step) {
        Trajectory traj = solve_ode_interval_fn(p, q, r, tau1, b, 0.0, 1.0, opt);
        const double loc_slack = 1e-9 * std::fmax(1.0, std::fabs(tau1));
        for (const auto& z : traj.zeros()) {
            if (z.t <= tau1 + loc_slack) continue;
            if (z.t <= b + end_slack) return {true, ConjugateWitness{tau1, z.t}};
            break;
        }
    }
    return {false, {}};
}

inline std::pair<bool, ConjugateWitness> interval_oscillatory_q(
    const PiecewiseFn& p, const PiecewiseFn& q, const PiecewiseFn& r, double a, double b,
    double scan_step = 0, IntegratorOptions opt = {}) {
    return interval_oscillatory_fn(to_fn(p), to_fn(q), to_fn(r), a, b, scan_step, opt);
}

inline std::pair<bool, ConjugateWitness> interval_oscillatory(const PiecewiseFn& p,
                                                              const PiecewiseFn& r, double a,
                                                              double b, double scan_step = 0,
                                                              IntegratorOptions opt = {}) {
    return interval_oscillatory_q(p, PiecewiseFn(constant(0.0)), r, a, b, scan_step, opt);
}

// Maximum scaled residual of the integrated system over 3 interior
// collocation points per accepted step.
inline double max_residual(const Trajectory& traj, const EquationSpec& eq) {
    double worst = 0;
    for (const auto& s : traj.segments()) {
        for (double theta : {0.25, 0.5, 0.75}) {
            const double t = s.t_begin + (s.t_end - s.t_begin) * theta;
            const double pt = eq.p(t);
            const double psi = s.psi(t);
            const double r1 = s.dphi(t) - psi / pt;
            double sum = eq.f(t) - eq.q(t) / pt * psi;
            double term_scale = std::fmax(std::fabs(eq.f(t)), std::fabs(eq.q(t) / pt * psi));
            for (const auto& term : eq.terms) {
                const double a = term.alpha(t);
                const double phi_a = a >= s.t_begin && a <= t ? s.phi(a) : traj.phi(a);
                sum -= term.r(t) * phi_a;
                term_scale = std::fmax(term_scale, std::fabs(term.r(t) * phi_a));
            }
            const double r2 = s.dpsi(t) - sum;
            const double scale1 = std::fmax(1.0, std::fabs(psi / pt));
            const double scale2 = std::fmax(1.0, term_scale);
            worst = std::fmax(worst, std::fmax(std::fabs(r1) / scale1, std::fabs(r2) / scale2));
        }
    }
    return worst;
}

}  // namespace fdelab
