#pragma once

// The functional Riccati equation attached to the delay equation
//
//   y' + y^2/p + (q/p) y - (f/lambda) exp{-int_{t1}^t y/p}
//      + sum_j r_j(t) exp{-int_{alpha_j(t)}^t y/p} = 0,
//
// its homogeneous counterpart (with comparison coefficients r_{1,j} and no
// forcing term), the solution <-> Riccati transforms y = p phi'/phi and
// phi = lambda exp{int y/p}, blow-up (maximum existence interval) detection,
// and numerical verification of the scalar and functional comparison
// orderings. The accumulated integral F(t) = int_{t1}^t y/p is carried as an
// augmented state variable, so delayed integrals cost F(t) - F(alpha(t)).

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "expr.hpp"
#include "integrator.hpp"
#include "quadrature.hpp"
#include "rk.hpp"
#include "trajectory.hpp"

namespace fdelab {

struct RiccatiProblem {
    EquationSpec eq;     // in homogeneous mode the r_j play the role of r_{1,j}
    double lambda = 1;   // != 0; scales the forcing term
    double t1 = 0;
    PiecewiseFn gamma;   // past values y(t) = gamma(t), t <= t1
    bool homogeneous = false;

    void validate() const {
        if (lambda == 0) throw std::invalid_argument("riccati: lambda must be nonzero");
        const double left = gamma(t1 - 1e-9 * std::fmax(1.0, std::fabs(t1)));
        const double at = gamma(t1);
        if (std::isfinite(left) && std::fabs(left - at) > 1e-6 * std::fmax(1.0, std::fabs(at)))
            throw std::invalid_argument("riccati: gamma must be continuous at t1");
    }
};

struct BlowUpRecord {
    double t_escape = 0;
    int direction = 0;  // sign of y at escape
};

struct RiccatiSegment {
    double t_begin = 0, t_end = 0;
    std::function<double(double)> y, F, dy;
};

struct RiccatiOptions {
    double tol = 1e-9;
    double y_max = 1e8;          // blow-up threshold on |y|
    double h_min_blowup = 1e-6;  // accepted steps below this near the threshold
    int max_disc_order = 3;
};

class RiccatiTrajectory {
  public:
    RiccatiTrajectory() = default;
    RiccatiTrajectory(double t1, ScalarFn p, ScalarFn past, std::vector<RiccatiSegment> segs,
                      std::optional<BlowUpRecord> blowup, bool reached, double horizon)
        : t1_(t1), p_(std::move(p)), past_(std::move(past)), segments_(std::move(segs)),
          blowup_(blowup), reached_horizon_(reached), horizon_(horizon) {}

    double t1() const { return t1_; }
    double t_end() const { return segments_.empty() ? t1_ : segments_.back().t_end; }
    bool reached_horizon() const { return reached_horizon_; }
    double horizon() const { return horizon_; }
    const std::optional<BlowUpRecord>& blowup() const { return blowup_; }
    const std::vector<RiccatiSegment>& segments() const { return segments_; }
    const ScalarFn& p() const { return p_; }

    double y(double t) const {
        if (t <= t1_) return past_(t);
        return locate(t).y(t);
    }

    double dy(double t) const { return locate(t).dy(t); }

    // F(t) = int_{t1}^t y(tau)/p(tau) dtau, extended left of t1 with the past
    double F(double t) const {
        if (t <= t1_) {
            if (t == t1_) return 0.0;
            auto integrand = [this](double tau) { return past_(tau) / p_(tau); };
            std::vector<double> bks = p_.breakpoints;
            bks.insert(bks.end(), past_.breakpoints.begin(), past_.breakpoints.end());
            return -quad_fn(integrand, t, t1_, bks, QuadOptions{1e-12, 2000});
        }
        return locate(t).F(t);
    }

  private:
    const RiccatiSegment& locate(double t) const {
        if (segments_.empty()) throw std::domain_error("riccati trajectory: empty");
        const double scale = std::fmax(1.0, std::fabs(t));
        if (t > segments_.back().t_end + 1e-10 * scale)
            throw std::domain_error("riccati trajectory: t beyond computed span");
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (t <= segments_[mid].t_end) hi = mid; else lo = mid + 1;
        }
        return segments_[lo];
    }

    double t1_ = 0;
    ScalarFn p_;
    ScalarFn past_;
    std::vector<RiccatiSegment> segments_;
    std::optional<BlowUpRecord> blowup_;
    bool reached_horizon_ = false;
    double horizon_ = 0;
};

// Integrate the functional Riccati equation up to `horizon` or a detected
// blow-up (a result variant, not a failure).
inline RiccatiTrajectory solve_riccati(const RiccatiProblem& prob, double horizon,
                                       RiccatiOptions opt = {}) {
    prob.validate();
    const EquationSpec& eq = prob.eq;
    const double t1 = prob.t1;

    auto steps = std::make_shared<std::vector<rk::DenseStep<2>>>();
    std::vector<bool> identity_term;
    for (const auto& term : eq.terms)
        identity_term.push_back(detail::is_identity_argument(term.alpha, t1, horizon));

    ScalarFn p_fn = to_fn(eq.p);
    ScalarFn past_fn = to_fn(prob.gamma);

    std::vector<double> left_bks = p_fn.breakpoints;
    left_bks.insert(left_bks.end(), past_fn.breakpoints.begin(), past_fn.breakpoints.end());
    auto F_left = [&prob, &eq, left_bks](double a, double t1v) {
        auto integrand = [&prob, &eq](double tau) { return prob.gamma(tau) / eq.p(tau); };
        return -quad_fn(integrand, a, t1v, left_bks, QuadOptions{1e-12, 2000});
    };

    auto F_at = [&](double a, double F_now, double t_now) -> double {
        (void)t_now;
        if (a <= t1) return F_left(a, t1);
        const auto* ds = rk::locate_step(*steps, a);
        if (!ds) return F_now;  // no accepted step yet: a == start of first step
        return ds->value(1, a);
    };

    auto rhs = [&](double t, const std::array<double, 2>& st, std::array<double, 2>& d) {
        const double y = st[0], F = st[1];
        const double pt = eq.p(t);
        double rate = y * y / pt + eq.q(t) / pt * y;
        if (!prob.homogeneous)
            rate -= eq.f(t) / prob.lambda * std::exp(-F);
        for (std::size_t j = 0; j < eq.terms.size(); ++j) {
            const double rj = eq.terms[j].r(t);
            if (rj == 0.0) continue;
            double factor = 1.0;
            if (!identity_term[j]) {
                const double a = eq.terms[j].alpha(t);
                factor = std::exp(-(F - F_at(a, F, t)));
            }
            rate += rj * factor;
        }
        d[0] = -rate;
        d[1] = y / pt;
    };

    rk::Options<2> ropt;
    ropt.tol = opt.tol;
    const bool has_delay =
        std::any_of(identity_term.begin(), identity_term.end(), [](bool b) { return !b; });
    if (has_delay) {
        ropt.step_cap = [&eq, &identity_term](double t, double h) {
            static constexpr double stages[] = {0.2, 0.3, 0.8, 8.0 / 9.0, 1.0};
            const double slack = 1e-12 * std::fmax(1.0, std::fabs(t));
            auto good = [&](double hh) {
                for (double c : stages) {
                    const double tau = t + c * hh;
                    for (std::size_t j = 0; j < eq.terms.size(); ++j) {
                        if (identity_term[j]) continue;
                        if (eq.terms[j].alpha(tau) > t + slack) return false;
                    }
                }
                return true;
            };
            if (good(h)) return h;
            double guess = h;
            for (std::size_t j = 0; j < eq.terms.size(); ++j)
                if (!identity_term[j]) guess = std::fmin(guess, t - eq.terms[j].alpha(t));
            if (guess > 0 && guess < h && good(guess)) return guess;
            double lo = 0, hi = h;
            for (int i = 0; i < 50; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (good(mid)) lo = mid; else hi = mid;
            }
            return lo;
        };
    }
    ropt.stop = [&opt](double, const std::array<double, 2>& y, double h) {
        return std::fabs(y[0]) > opt.y_max && h < opt.h_min_blowup;
    };

    HistorySpec pseudo_hist{t1, prob.gamma, 0.0};
    const auto mesh = build_integration_mesh(eq, pseudo_hist, horizon, opt.max_disc_order);

    const std::array<double, 2> y0{prob.gamma(t1), 0.0};
    if (!std::isfinite(y0[0]))
        throw IntegrationError("riccati: gamma not evaluable at t1", t1);

    auto res = rk::integrate<2>(rhs, t1, horizon, y0, mesh, *steps, ropt);

    std::optional<BlowUpRecord> blowup;
    if (res.outcome == rk::Outcome::Stopped) {
        blowup = BlowUpRecord{res.t_end, res.y_end[0] > 0 ? +1 : -1};
    } else if (res.outcome == rk::Outcome::StepUnderflow) {
        if (std::fabs(res.y_end[0]) > 1e6)
            blowup = BlowUpRecord{res.t_end, res.y_end[0] > 0 ? +1 : -1};
        else
            throw IntegrationError("riccati: step size underflow", res.t_end);
    }

    std::vector<RiccatiSegment> segs;
    segs.reserve(steps->size());
    for (std::size_t i = 0; i < steps->size(); ++i) {
        auto ds = std::shared_ptr<const rk::DenseStep<2>>(steps, &(*steps)[i]);
        RiccatiSegment s;
        s.t_begin = ds->t0;
        s.t_end = ds->t0 + ds->h;
        s.y = [ds](double t) { return ds->value(0, t); };
        s.F = [ds](double t) { return ds->value(1, t); };
        s.dy = [ds](double t) { return ds->derivative(0, t); };
        segs.push_back(std::move(s));
    }
    return RiccatiTrajectory(t1, p_fn, past_fn, std::move(segs), blowup,
                             res.outcome == rk::Outcome::ReachedEnd, horizon);
}

// y(t) = p(t) phi'(t)/phi(t) = psi(t)/phi(t) on [t1, end of traj], held at
// y(t1) for t <= t1; F accumulated by per-segment quadrature of phi'/phi.
// Throws if phi comes within zero_tol of vanishing on the span.
inline RiccatiTrajectory riccati_from_solution(const Trajectory& traj, double t1,
                                               const PiecewiseFn& p, double zero_tol = 1e-10) {
    if (traj.empty()) throw std::invalid_argument("riccati_from_solution: empty trajectory");
    if (t1 < traj.t_begin() - 1e-12)
        throw std::invalid_argument("riccati_from_solution: t1 precedes the trajectory");

    double min_abs = kInf;
    for (const auto& s : traj.segments()) {
        if (s.t_end <= t1) continue;
        for (int i = 0; i <= 8; ++i) {
            const double t = std::fmax(t1, s.t_begin) +
                             (s.t_end - std::fmax(t1, s.t_begin)) * i / 8.0;
            min_abs = std::fmin(min_abs, std::fabs(s.phi(t)));
        }
    }
    const double tol_abs = zero_tol * std::fmax(1.0, traj.running_max_abs_phi());
    if (!(min_abs > tol_abs))
        throw std::domain_error("riccati transform undefined: phi vanishes on the span");

    auto shared = std::make_shared<Trajectory>(traj);

    // prefix sums of int phi'/phi per segment, measured from t1
    auto prefixes = std::make_shared<std::vector<double>>();
    auto seg_index = std::make_shared<std::vector<std::size_t>>();
    double acc = 0;
    const auto& segs = traj.segments();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].t_end <= t1) continue;
        const double lo = std::fmax(t1, segs[i].t_begin);
        seg_index->push_back(i);
        prefixes->push_back(acc);
        auto g = [&segs, i](double tau) { return segs[i].dphi(tau) / segs[i].phi(tau); };
        acc += quad_fn(g, lo, segs[i].t_end, {}, QuadOptions{1e-13, 200});
    }

    std::vector<RiccatiSegment> out;
    out.reserve(seg_index->size());
    for (std::size_t k = 0; k < seg_index->size(); ++k) {
        const std::size_t i = (*seg_index)[k];
        const double lo = std::fmax(t1, segs[i].t_begin);
        const double base = (*prefixes)[k];
        RiccatiSegment rs;
        rs.t_begin = lo;
        rs.t_end = segs[i].t_end;
        rs.y = [shared, i](double t) {
            const auto& s = shared->segments()[i];
            return s.psi(t) / s.phi(t);
        };
        rs.dy = [shared, i](double t) {
            const auto& s = shared->segments()[i];
            const double phi = s.phi(t);
            return (s.dpsi(t) * phi - s.psi(t) * s.dphi(t)) / (phi * phi);
        };
        rs.F = [shared, i, lo, base](double t) {
            const auto& s = shared->segments()[i];
            auto g = [&s](double tau) { return s.dphi(tau) / s.phi(tau); };
            return base + quad_fn(g, lo, t, {}, QuadOptions{1e-13, 200});
        };
        out.push_back(std::move(rs));
    }

    const double y_t1 = traj.psi(t1) / traj.phi(t1);
    ScalarFn past{[y_t1](double) { return y_t1; }, {}};
    return RiccatiTrajectory(t1, to_fn(p), past, std::move(out), std::nullopt,
                             traj.reached_horizon(), traj.horizon());
}

// phi(t) = lambda * exp(F(t)); psi = p phi' = y * phi. The result has no
// zeros by construction.
inline Trajectory solution_from_riccati(const RiccatiTrajectory& ric, double lambda) {
    if (lambda == 0) throw std::invalid_argument("solution_from_riccati: lambda must be nonzero");
    auto shared = std::make_shared<RiccatiTrajectory>(ric);
    std::vector<TrajectorySegment> segs;
    segs.reserve(ric.segments().size());
    for (std::size_t i = 0; i < ric.segments().size(); ++i) {
        const auto& rs = ric.segments()[i];
        TrajectorySegment s;
        s.t_begin = rs.t_begin;
        s.t_end = rs.t_end;
        s.phi = [shared, i, lambda](double t) {
            const auto& r = shared->segments()[i];
            return lambda * std::exp(r.F(t));
        };
        s.psi = [shared, i, lambda](double t) {
            const auto& r = shared->segments()[i];
            return lambda * r.y(t) * std::exp(r.F(t));
        };
        s.dphi = [shared, i, lambda](double t) {
            const auto& r = shared->segments()[i];
            return lambda * r.y(t) / shared->p()(t) * std::exp(r.F(t));
        };
        s.dpsi = [shared, i, lambda](double t) {
            const auto& r = shared->segments()[i];
            const double phi = lambda * std::exp(r.F(t));
            return phi * (r.dy(t) + r.y(t) * r.y(t) / shared->p()(t));
        };
        segs.push_back(std::move(s));
    }
    Trajectory traj(std::move(segs), {}, ric.reached_horizon(), ric.horizon());
    detect_zeros(traj);
    return traj;
}

}  // namespace fdelab
