#pragma once

// Adaptive quadrature with a fixed-order Gauss-Kronrod 7-15 rule. Known
// breakpoints of the integrand are always panel boundaries, so jump
// discontinuities never straddle a panel.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "expr.hpp"

namespace fdelab {

class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& msg, double where)
        : std::runtime_error(msg + " near t = " + detail::fmt_double(where)), where_(where) {}
    double where() const { return where_; }

  private:
    double where_;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (positive half; symmetric).
struct Gk15 {
    static constexpr double xk[8] = {
        0.0,
        0.2077849550078985, 0.4058451513773972, 0.5860872354676911,
        0.7415311855993944, 0.8648644233597691, 0.9491079123427585,
        0.9914553711208126,
    };
    static constexpr double wk[8] = {
        0.2094821410847278,
        0.2044329400752989, 0.1903505780647854, 0.1690047266392679,
        0.1406532597155259, 0.1047900103222502, 0.0630920926299786,
        0.0229353220105292,
    };
    // Gauss-7 weights aligned with xk[0], xk[2], xk[4], xk[6].
    static constexpr double wg[4] = {
        0.4179591836734694, 0.3818300505051189, 0.2797053914892767, 0.1294849661688697,
    };
};

template <class F>
inline void gk15_panel(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    fv[0] = f(c);
    for (int i = 1; i < 8; ++i) {
        fv[2 * i - 1] = f(c - h * Gk15::xk[i]);
        fv[2 * i] = f(c + h * Gk15::xk[i]);
    }
    double k = Gk15::wk[0] * fv[0];
    double g = Gk15::wg[0] * fv[0];
    for (int i = 1; i < 8; ++i) {
        const double s = fv[2 * i - 1] + fv[2 * i];
        k += Gk15::wk[i] * s;
        if (i % 2 == 0) g += Gk15::wg[i / 2] * s;
    }
    value = k * h;
    err = std::fabs(k - g) * h;
    // sharpen the raw difference the usual way
    err = err > 0 ? std::pow(200.0 * err, 1.5) : 0.0;
    if (!std::isfinite(value)) err = kInf;
}

}  // namespace detail

struct QuadOptions {
    double tol = 1e-10;      // absolute tolerance on the whole integral
    int max_panels = 2000;   // refinement budget before giving up
};

// Integrate `f` over [a, b]; `breakpoints` (sorted or not) are forced as
// panel edges. Throws QuadratureError when panel refinement exhausts the
// budget (non-integrable singularity or hopelessly rough integrand).
template <class F>
inline double quad_fn(const F& f, double a, double b,
                      const std::vector<double>& breakpoints, QuadOptions opt = {}) {
    if (!(a <= b)) throw std::invalid_argument("quad: requires a <= b");
    if (a == b) return 0.0;

    std::vector<double> edges{a, b};
    for (double bp : breakpoints)
        if (bp > a && bp < b) edges.push_back(bp);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    struct Panel { double a, b, value, err; };
    std::vector<Panel> stack;
    stack.reserve(64);
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p{edges[i], edges[i + 1], 0, 0};
        detail::gk15_panel(f, p.a, p.b, p.value, p.err);
        total += p.value;
        total_err += p.err;
        stack.push_back(p);
    }

    int used = static_cast<int>(stack.size());
    while (total_err > opt.tol && !stack.empty()) {
        // split the worst panel
        std::size_t worst = 0;
        for (std::size_t i = 1; i < stack.size(); ++i)
            if (stack[i].err > stack[worst].err) worst = i;
        Panel p = stack[worst];
        stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(worst));

        const double mid = 0.5 * (p.a + p.b);
        if (!(p.a < mid && mid < p.b) || used >= opt.max_panels)
            throw QuadratureError("quad: panel refinement budget exhausted", mid);
        Panel l{p.a, mid, 0, 0}, r{mid, p.b, 0, 0};
        detail::gk15_panel(f, l.a, l.b, l.value, l.err);
        detail::gk15_panel(f, r.a, r.b, r.value, r.err);
        used += 2;
        total += l.value + r.value - p.value;
        total_err += l.err + r.err - p.err;
        stack.push_back(l);
        stack.push_back(r);
    }
    if (!std::isfinite(total))
        throw QuadratureError("quad: integrand not finite", 0.5 * (a + b));
    return total;
}

inline double quad(const ScalarFn& f, double a, double b, double tol = 1e-10) {
    return quad_fn(f.f, a, b, f.breakpoints, QuadOptions{tol, 2000});
}

inline double quad(const PiecewiseFn& f, double a, double b, double tol = 1e-10) {
    return quad_fn([&f](double t) { return f(t); }, a, b, f.finite_breakpoints(),
                   QuadOptions{tol, 2000});
}

// Signed integral allowing a > b.
inline double quad_signed(const ScalarFn& f, double a, double b, double tol = 1e-10) {
    return a <= b ? quad(f, a, b, tol) : -quad(f, b, a, tol);
}

}  // namespace fdelab
