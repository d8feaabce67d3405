#pragma once

// Dense piecewise solution of a second-order problem: phi and psi = p*phi'
// with their derivatives, plus detected zeros of phi. Segments are closed
// over arbitrary evaluators so that transform-derived solutions (Riccati
// exponentials, expression witnesses) share the representation with
// integrator output.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "expr.hpp"

namespace fdelab {

struct TrajectorySegment {
    double t_begin = 0, t_end = 0;
    std::function<double(double)> phi, psi, dphi, dpsi;
};

struct ZeroRecord {
    double t = 0;        // location
    double bracket = 0;  // half-width of the final bracketing interval
    double phi = 0;      // value at t (|phi| <= zero_tol)
};

struct NearZeroRecord {
    double t = 0;
    double phi = 0;  // local minimum of |phi| below zero_tol, no sign change
};

class Trajectory {
  public:
    Trajectory() = default;

    Trajectory(std::vector<TrajectorySegment> segments, std::vector<double> mesh,
               bool reached_horizon, double horizon)
        : segments_(std::move(segments)), mesh_(std::move(mesh)),
          reached_horizon_(reached_horizon), horizon_(horizon) {}

    bool empty() const { return segments_.empty(); }
    double t_begin() const { return segments_.empty() ? kNaN : segments_.front().t_begin; }
    double t_end() const { return segments_.empty() ? kNaN : segments_.back().t_end; }
    double horizon() const { return horizon_; }
    bool reached_horizon() const { return reached_horizon_; }
    const std::vector<double>& mesh() const { return mesh_; }
    const std::vector<TrajectorySegment>& segments() const { return segments_; }

    // Optional history attached for t < t_begin (the theta of the Cauchy data).
    void set_history(std::function<double(double)> phi_past) { history_ = std::move(phi_past); }

    double phi(double t) const {
        if (!segments_.empty() && t < segments_.front().t_begin && history_) return history_(t);
        return locate_checked(t).phi(t);
    }
    double psi(double t) const { return locate_checked(t).psi(t); }
    double dphi(double t) const { return locate_checked(t).dphi(t); }
    double dpsi(double t) const { return locate_checked(t).dpsi(t); }

    const std::vector<ZeroRecord>& zeros() const { return zeros_; }
    const std::vector<NearZeroRecord>& near_zeros() const { return near_zeros_; }
    void set_zeros(std::vector<ZeroRecord> z, std::vector<NearZeroRecord> nz) {
        zeros_ = std::move(z);
        near_zeros_ = std::move(nz);
    }

    double running_max_abs_phi() const {
        double m = 0;
        for (const auto& s : segments_) {
            for (int i = 0; i <= 4; ++i) {
                double t = s.t_begin + (s.t_end - s.t_begin) * i / 4.0;
                m = std::fmax(m, std::fabs(s.phi(t)));
            }
        }
        return m;
    }

  private:
    const TrajectorySegment& locate_checked(double t) const {
        if (segments_.empty()) throw std::domain_error("trajectory: empty");
        const double scale = std::fmax(1.0, std::fabs(t));
        if (t < segments_.front().t_begin - 1e-10 * scale)
            throw std::domain_error("trajectory: t before computed span");
        if (t > segments_.back().t_end + 1e-10 * scale)
            throw std::domain_error("trajectory: t beyond computed span");
        std::size_t lo = 0, hi = segments_.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (t <= segments_[mid].t_end) hi = mid; else lo = mid + 1;
        }
        return segments_[lo];
    }

    std::vector<TrajectorySegment> segments_;
    std::vector<double> mesh_;
    bool reached_horizon_ = false;
    double horizon_ = kNaN;
    std::function<double(double)> history_;
    std::vector<ZeroRecord> zeros_;
    std::vector<NearZeroRecord> near_zeros_;
};

// Locate all sign-change roots of phi by sampling each segment and bisecting
// the brackets; |phi| dips below zero_tol without a sign change are reported
// separately as near-zeros, never counted as zeros. zero_tol <= 0 selects the
// default 1e-10 * max(1, running max |phi|).
inline void detect_zeros(Trajectory& traj, double zero_tol = 0, int samples_per_segment = 8) {
    std::vector<ZeroRecord> zeros;
    std::vector<NearZeroRecord> nears;
    if (traj.empty()) {
        traj.set_zeros(std::move(zeros), std::move(nears));
        return;
    }
    if (zero_tol <= 0) zero_tol = 1e-10 * std::fmax(1.0, traj.running_max_abs_phi());

    // collect sample points
    std::vector<double> ts;
    std::vector<double> vs;
    for (const auto& s : traj.segments()) {
        const int n = samples_per_segment;
        for (int i = 0; i < n; ++i) {
            double t = s.t_begin + (s.t_end - s.t_begin) * i / double(n);
            if (!ts.empty() && t <= ts.back()) continue;
            ts.push_back(t);
            vs.push_back(s.phi(t));
        }
    }
    ts.push_back(traj.t_end());
    vs.push_back(traj.phi(traj.t_end()));

    auto phi_at = [&traj](double t) { return traj.phi(t); };
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        double a = ts[i], b = ts[i + 1], fa = vs[i], fb = vs[i + 1];
        if (fa == 0.0) {
            // a sample landing exactly on a root counts only if the
            // surrounding samples change sign (never at the launch point)
            if (i > 0 && vs[i - 1] * fb < 0.0) zeros.push_back(ZeroRecord{a, 0.0, 0.0});
            continue;
        }
        if (fa * fb < 0.0) {
            for (int it = 0; it < 200 && (b - a) > 1e-14 * std::fmax(1.0, std::fabs(b)); ++it) {
                double m = 0.5 * (a + b), fm = phi_at(m);
                if (fm == 0.0) { a = b = m; break; }
                if (fa * fm < 0) { b = m; fb = fm; } else { a = m; fa = fm; }
            }
            double z = 0.5 * (a + b);
            zeros.push_back(ZeroRecord{z, 0.5 * (b - a), phi_at(z)});
        }
    }

    // tangential near-zeros: local minima of |phi| below zero_tol with no
    // sign change, refined by ternary search between the bracketing samples
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        double v0 = std::fabs(vs[i - 1]), v1 = std::fabs(vs[i]), v2 = std::fabs(vs[i + 1]);
        if (!(v1 <= v0 && v1 <= v2) || vs[i - 1] * vs[i + 1] <= 0 || v1 == 0.0) continue;
        double lo = ts[i - 1], hi = ts[i + 1];
        for (int it = 0; it < 100 && (hi - lo) > 1e-13 * std::fmax(1.0, std::fabs(hi)); ++it) {
            double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
            if (std::fabs(phi_at(m1)) <= std::fabs(phi_at(m2))) hi = m2; else lo = m1;
        }
        double tm = 0.5 * (lo + hi), vm = phi_at(tm);
        if (std::fabs(vm) < zero_tol) nears.push_back(NearZeroRecord{tm, vm});
    }

    traj.set_zeros(std::move(zeros), std::move(nears));
}

}  // namespace fdelab
