#pragma once

// Embedded Dormand-Prince 5(4) pair with the standard quartic continuous
// extension. Drives every initial value problem in the library: the
// functional-differential system, plain second-order ODEs and the Riccati
// equations. The driver honors a hard mesh (points it must land on exactly)
// and an optional per-step cap used by the method of steps to keep deviating
// arguments inside already-computed territory.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace fdelab {

namespace rk {

// y(t0 + theta*h) = r1 + theta*(r2 + (1-theta)*(r3 + theta*(r4 + (1-theta)*r5)))
template <std::size_t N>
struct DenseStep {
    double t0 = 0, h = 0;
    std::array<std::array<double, 5>, N> rcont{};

    double value(std::size_t i, double t) const {
        const double th = (t - t0) / h;
        const auto& r = rcont[i];
        return r[0] + th * (r[1] + (1 - th) * (r[2] + th * (r[3] + (1 - th) * r[4])));
    }
    double derivative(std::size_t i, double t) const {
        const double th = (t - t0) / h;
        const auto& r = rcont[i];
        const double d = r[1] + (1 - 2 * th) * r[2] + th * (2 - 3 * th) * r[3] +
                         2 * th * (1 - th) * (1 - 2 * th) * r[4];
        return d / h;
    }
};

enum class Outcome { ReachedEnd, Stopped, StepUnderflow };

// Step containing t (steps are contiguous and sorted); clamps to the ends.
template <std::size_t N>
inline const DenseStep<N>* locate_step(const std::vector<DenseStep<N>>& steps, double t) {
    if (steps.empty()) return nullptr;
    if (t <= steps.front().t0) return &steps.front();
    if (t >= steps.back().t0) return &steps.back();
    std::size_t lo = 0, hi = steps.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (steps[mid].t0 <= t) lo = mid; else hi = mid;
    }
    return &steps[lo];
}

template <std::size_t N>
struct Result {
    Outcome outcome = Outcome::ReachedEnd;
    double t_end = 0;                       // last accepted time
    std::array<double, N> y_end{};
    double last_step = 0;                   // size of the last accepted step
};

template <std::size_t N>
struct Options {
    double tol = 1e-9;            // absolute and relative tolerance
    double h_min_factor = 1e-13;  // underflow threshold, scaled by max(1,|t|)
    double h_max = 0;             // optional global cap (0 = none)

    // Cap the step taken from t (method of steps); return the allowed h.
    std::function<double(double t, double h)> step_cap;

    // Called after each accepted step; return true to stop integration.
    std::function<bool(double t, const std::array<double, N>& y, double h)> stop;
};

namespace tableau {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace tableau

// Integrate y' = f(t, y) from (t_begin, y0) to t_end (t_end > t_begin),
// landing exactly on every mesh point in [t_begin, t_end]. `mesh` must be
// sorted ascending. Accepted steps are appended to `steps`, which the RHS is
// free to read back (delayed-argument lookups in the method of steps).
template <std::size_t N, class Rhs>
Result<N> integrate(const Rhs& f, double t_begin, double t_end,
                    const std::array<double, N>& y0, const std::vector<double>& mesh,
                    std::vector<DenseStep<N>>& steps, const Options<N>& opt = {}) {
    using namespace tableau;
    Result<N> res;
    res.t_end = t_begin;
    res.y_end = y0;
    if (!(t_end > t_begin)) return res;

    std::vector<double> stops;
    for (double m : mesh)
        if (m > t_begin && m < t_end) stops.push_back(m);
    stops.push_back(t_end);

    std::array<double, N> y = y0, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, ytmp{}, ynew{};
    double t = t_begin;
    std::size_t next_stop = 0;
    bool have_k1 = false;

    double span = stops.front() - t_begin;
    double h = span / 100.0;
    if (opt.h_max > 0) h = std::min(h, opt.h_max);

    auto finite = [](const std::array<double, N>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };

    while (next_stop < stops.size()) {
        const double seg_end = stops[next_stop];
        const double h_floor = opt.h_min_factor * std::fmax(1.0, std::fabs(t));
        if (seg_end - t <= h_floor) {
            // negligible gap between mesh points: snap across
            t = seg_end;
            res.t_end = t;
            ++next_stop;
            have_k1 = false;
            continue;
        }
        if (!have_k1) {
            f(t, y, k1);
            if (!finite(k1)) return res.outcome = Outcome::StepUnderflow, res;
            have_k1 = true;
        }

        if (h < h_floor) h = h_floor;
        if (opt.h_max > 0) h = std::min(h, opt.h_max);
        if (opt.step_cap) {
            double capped = opt.step_cap(t, h);
            if (capped < h_floor) { res.outcome = Outcome::StepUnderflow; return res; }
            h = capped;
        }
        bool hit_stop = false;
        const double h_unclamped = h;
        if (t + h >= seg_end - 1e-14 * std::fmax(1.0, std::fabs(seg_end))) {
            h = seg_end - t;
            hit_stop = true;
        }
        if (h <= h_floor && !hit_stop) { res.outcome = Outcome::StepUnderflow; return res; }

        // stages
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < N; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
        f(t + h, ynew, k7);

        // error estimate
        double err = 0;
        bool ok = finite(ynew) && finite(k7);
        if (ok) {
            for (std::size_t i = 0; i < N; ++i) {
                const double sk = opt.tol + opt.tol * std::fmax(std::fabs(y[i]), std::fabs(ynew[i]));
                const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                err += (e / sk) * (e / sk);
            }
            err = std::sqrt(err / double(N));
            if (!std::isfinite(err)) ok = false;
        }

        if (!ok || err > 1.0) {
            // reject
            const double shrink = ok ? std::fmax(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= shrink;
            if (h < h_floor) { res.outcome = Outcome::StepUnderflow; return res; }
            continue;
        }

        // accept: build the dense step
        DenseStep<N> ds;
        ds.t0 = t;
        ds.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double ydiff = ynew[i] - y[i];
            const double bspl = h * k1[i] - ydiff;
            ds.rcont[i][0] = y[i];
            ds.rcont[i][1] = ydiff;
            ds.rcont[i][2] = bspl;
            ds.rcont[i][3] = ydiff - h * k7[i] - bspl;
            ds.rcont[i][4] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                  d6 * k6[i] + d7 * k7[i]);
        }
        steps.push_back(ds);

        t += h;
        y = ynew;
        k1 = k7;  // FSAL
        res.t_end = t;
        res.y_end = y;
        res.last_step = h;
        if (hit_stop) {
            t = seg_end;  // land exactly
            res.t_end = t;
            ++next_stop;
            have_k1 = false;  // coefficients may jump across the mesh point
        }

        if (opt.stop && opt.stop(t, y, h)) { res.outcome = Outcome::Stopped; return res; }

        const double grow = std::fmin(5.0, std::fmax(0.2, 0.9 * std::pow(std::fmax(err, 1e-10), -0.2)));
        // a step clamped onto a mesh point must not throttle the controller
        h = hit_stop ? std::fmax(h_unclamped, h * grow) : h * grow;
        if (next_stop < stops.size()) {
            // do not let h run away past the remaining span
            h = std::fmin(h, stops.back() - t > 0 ? stops.back() - t : h);
        }
    }
    res.outcome = Outcome::ReachedEnd;
    return res;
}

}  // namespace rk

}  // namespace fdelab
