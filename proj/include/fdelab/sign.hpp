#pragma once

// Grid-based detection of the forcing sign pattern: a <= 0 interval followed
// by a >= 0 interval, with bisection refinement of the interval endpoints.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "expr.hpp"

namespace fdelab {

inline constexpr double kSignSlack = 1e-12;

struct SignedInterval {
    double lo = 0, hi = 0;
    int sign = 0;        // -1 for "<= 0", +1 for ">= 0"
    double margin = 0;   // max |f| attained on the interval
};

// Window plus the detected quadruple s1 < t1 <= s2 < t2. Empty pattern
// (no intervals) is a normal value, not an error.
struct SignPattern {
    double window_lo = 0, window_hi = 0;
    std::vector<SignedInterval> intervals;

    bool complete() const { return intervals.size() == 2; }
};

namespace detail {

inline bool sign_ok(double v, int sign) {
    return sign < 0 ? v <= kSignSlack : v >= -kSignSlack;
}

// Refine the boundary of a sign region between a failing and a passing point.
template <class F>
inline double refine_boundary(const F& f, double bad, double good, int sign) {
    for (int i = 0; i < 60 && std::fabs(good - bad) > 1e-13 * std::fmax(1.0, std::fabs(good)); ++i) {
        double mid = 0.5 * (bad + good);
        if (sign_ok(f(mid), sign)) good = mid; else bad = mid;
    }
    return good;
}

}  // namespace detail

// Scan [window_lo, window_hi] on a uniform grid and return the first
// quadruple: a "<= 0" interval of length >= min_len followed by a ">= 0"
// interval of length >= min_len starting no earlier than the first ends.
template <class F>
inline SignPattern find_sign_intervals_fn(const F& f, double window_lo, double window_hi,
                                          double min_len, double grid_step = 1e-2) {
    SignPattern out{window_lo, window_hi, {}};
    if (!(window_lo < window_hi) || !(min_len > 0)) return out;

    const long n = std::max(2L, std::lround(std::ceil((window_hi - window_lo) / grid_step)));
    auto grid_t = [&](long i) {
        return i >= n ? window_hi : window_lo + (window_hi - window_lo) * double(i) / double(n);
    };

    long i = 0;
    for (int want_sign : {-1, +1}) {
        std::optional<SignedInterval> found;
        while (i <= n) {
            // find start of a run
            while (i <= n && !detail::sign_ok(f(grid_t(i)), want_sign)) ++i;
            if (i > n) break;
            long run_begin = i;
            double margin = 0;
            while (i <= n && detail::sign_ok(f(grid_t(i)), want_sign)) {
                margin = std::fmax(margin, std::fabs(f(grid_t(i))));
                ++i;
            }
            long run_end = i - 1;  // last passing grid index
            double lo = grid_t(run_begin);
            double hi = grid_t(run_end);
            if (run_begin > 0)
                lo = detail::refine_boundary(f, grid_t(run_begin - 1), lo, want_sign);
            if (run_end < n)
                hi = detail::refine_boundary(f, grid_t(run_end + 1), hi, want_sign);
            if (want_sign > 0 && !out.intervals.empty())
                lo = std::fmax(lo, out.intervals.front().hi);  // enforce t1 <= s2
            if (hi - lo >= min_len) {
                found = SignedInterval{lo, hi, want_sign, margin};
                break;
            }
        }
        if (!found) return out;  // pattern incomplete: return what we have so far
        out.intervals.push_back(*found);
    }
    return out;
}

inline SignPattern find_sign_intervals(const PiecewiseFn& f, double window_lo, double window_hi,
                                       double min_len, double grid_step = 1e-2) {
    return find_sign_intervals_fn([&f](double t) { return f(t); }, window_lo, window_hi,
                                  min_len, grid_step);
}

inline SignPattern find_sign_intervals(const ScalarFn& f, double window_lo, double window_hi,
                                       double min_len, double grid_step = 1e-2) {
    return find_sign_intervals_fn(f.f, window_lo, window_hi, min_len, grid_step);
}

}  // namespace fdelab
