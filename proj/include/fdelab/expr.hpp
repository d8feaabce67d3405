#pragma once

// Scalar coefficient expression language: AST, parser, printer, evaluation,
// and piecewise-defined functions over t.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdelab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class ExprKind {
    Constant,
    Time,       // the variable t
    Add, Sub, Mul, Div, Pow,
    Sin, Cos, Tan, Exp, Ln, Abs,
    Min, Max,
    Indicator,  // ind(a,b): 1 when a <= t < b, else 0
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    double value = 0.0;       // Constant payload; Indicator uses [value, value2)
    double value2 = 0.0;
    ExprPtr lhs, rhs;

    explicit Expr(ExprKind k) : kind(k) {}
};

// ---- builders -------------------------------------------------------------

inline ExprPtr constant(double v) {
    auto e = std::make_shared<Expr>(ExprKind::Constant);
    e->value = v;
    return e;
}

inline ExprPtr time_var() { return std::make_shared<Expr>(ExprKind::Time); }

inline ExprPtr binary(ExprKind k, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>(k);
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    return e;
}

inline ExprPtr unary(ExprKind k, ExprPtr a) {
    auto e = std::make_shared<Expr>(k);
    e->lhs = std::move(a);
    return e;
}

inline ExprPtr add(ExprPtr a, ExprPtr b) { return binary(ExprKind::Add, std::move(a), std::move(b)); }
inline ExprPtr sub(ExprPtr a, ExprPtr b) { return binary(ExprKind::Sub, std::move(a), std::move(b)); }
inline ExprPtr mul(ExprPtr a, ExprPtr b) { return binary(ExprKind::Mul, std::move(a), std::move(b)); }
inline ExprPtr div(ExprPtr a, ExprPtr b) { return binary(ExprKind::Div, std::move(a), std::move(b)); }
inline ExprPtr pow(ExprPtr a, ExprPtr b) { return binary(ExprKind::Pow, std::move(a), std::move(b)); }

// Unary minus; folds a negated literal into a signed constant.
inline ExprPtr neg(ExprPtr a) {
    if (a->kind == ExprKind::Constant) return constant(-a->value);
    return sub(constant(0.0), std::move(a));
}

inline ExprPtr indicator(double a, double b) {
    auto e = std::make_shared<Expr>(ExprKind::Indicator);
    e->value = a;
    e->value2 = b;
    return e;
}

// ---- evaluation -----------------------------------------------------------

// Domain violations (ln of a non-positive argument, fractional power of a
// negative base) evaluate to NaN; callers treat non-finite results as errors.
inline double eval(const Expr& e, double t) {
    switch (e.kind) {
        case ExprKind::Constant: return e.value;
        case ExprKind::Time:     return t;
        case ExprKind::Add: return eval(*e.lhs, t) + eval(*e.rhs, t);
        case ExprKind::Sub: return eval(*e.lhs, t) - eval(*e.rhs, t);
        case ExprKind::Mul: return eval(*e.lhs, t) * eval(*e.rhs, t);
        case ExprKind::Div: return eval(*e.lhs, t) / eval(*e.rhs, t);
        case ExprKind::Pow: return std::pow(eval(*e.lhs, t), eval(*e.rhs, t));
        case ExprKind::Sin: return std::sin(eval(*e.lhs, t));
        case ExprKind::Cos: return std::cos(eval(*e.lhs, t));
        case ExprKind::Tan: return std::tan(eval(*e.lhs, t));
        case ExprKind::Exp: return std::exp(eval(*e.lhs, t));
        case ExprKind::Ln: {
            const double x = eval(*e.lhs, t);
            return x > 0.0 ? std::log(x) : kNaN;
        }
        case ExprKind::Abs: return std::fabs(eval(*e.lhs, t));
        case ExprKind::Min: return std::fmin(eval(*e.lhs, t), eval(*e.rhs, t));
        case ExprKind::Max: return std::fmax(eval(*e.lhs, t), eval(*e.rhs, t));
        case ExprKind::Indicator: return (t >= e.value && t < e.value2) ? 1.0 : 0.0;
    }
    return kNaN;
}

inline double eval(const ExprPtr& e, double t) { return eval(*e, t); }

inline bool depends_on_time(const Expr& e) {
    if (e.kind == ExprKind::Time) return true;
    if (e.lhs && depends_on_time(*e.lhs)) return true;
    if (e.rhs && depends_on_time(*e.rhs)) return true;
    return false;
}

// ---- printing -------------------------------------------------------------

namespace detail {

inline std::string fmt_double(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom
inline int precedence(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Add: return 1;
        case ExprKind::Sub:
            return (e.lhs->kind == ExprKind::Constant && e.lhs->value == 0.0) ? 3 : 1;
        case ExprKind::Mul:
        case ExprKind::Div: return 2;
        case ExprKind::Pow: return 4;
        case ExprKind::Constant:
            return e.value < 0 ? 3 : 5;
        default: return 5;
    }
}

inline void print_to(const Expr& e, std::string& out);

inline void print_child(const Expr& c, int min_prec, std::string& out) {
    if (precedence(c) < min_prec) {
        out += '(';
        print_to(c, out);
        out += ')';
    } else {
        print_to(c, out);
    }
}

inline void print_to(const Expr& e, std::string& out) {
    switch (e.kind) {
        case ExprKind::Constant: out += fmt_double(e.value); return;
        case ExprKind::Time: out += 't'; return;
        case ExprKind::Add:
            print_child(*e.lhs, 1, out); out += " + "; print_child(*e.rhs, 2, out); return;
        case ExprKind::Sub:
            if (e.lhs->kind == ExprKind::Constant && e.lhs->value == 0.0) {
                out += '-';
                print_child(*e.rhs, 4, out);
                return;
            }
            print_child(*e.lhs, 1, out); out += " - "; print_child(*e.rhs, 2, out); return;
        case ExprKind::Mul:
            print_child(*e.lhs, 2, out); out += "*"; print_child(*e.rhs, 3, out); return;
        case ExprKind::Div:
            print_child(*e.lhs, 2, out); out += "/"; print_child(*e.rhs, 5, out); return;
        case ExprKind::Pow:
            print_child(*e.lhs, 5, out); out += "^"; print_child(*e.rhs, 5, out); return;
        case ExprKind::Sin: out += "sin("; print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Cos: out += "cos("; print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Tan: out += "tan("; print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Exp: out += "exp("; print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Ln:  out += "ln(";  print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Abs: out += "abs("; print_to(*e.lhs, out); out += ')'; return;
        case ExprKind::Min:
            out += "min("; print_to(*e.lhs, out); out += ", "; print_to(*e.rhs, out); out += ')'; return;
        case ExprKind::Max:
            out += "max("; print_to(*e.lhs, out); out += ", "; print_to(*e.rhs, out); out += ')'; return;
        case ExprKind::Indicator:
            out += "ind(" + fmt_double(e.value) + ", " + fmt_double(e.value2) + ")"; return;
    }
}

}  // namespace detail

inline std::string print(const Expr& e) {
    std::string out;
    detail::print_to(e, out);
    return out;
}

inline std::string print(const ExprPtr& e) { return print(*e); }

// ---- errors ---------------------------------------------------------------

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"), pos_(pos) {}
    std::size_t position() const { return pos_; }

  private:
    std::size_t pos_;
};

// ---- parser ---------------------------------------------------------------

namespace detail {

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src) {}

    ExprPtr parse_expression() {
        ExprPtr e = additive();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

    // Exposed pieces used by the piecewise reader.
    ExprPtr additive() {
        ExprPtr left = multiplicative();
        for (;;) {
            skip_ws();
            if (consume('+')) left = add(left, multiplicative());
            else if (consume('-')) left = sub(left, multiplicative());
            else return left;
        }
    }

    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    bool consume(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) { ++pos_; return true; }
        return false;
    }
    void expect(char c, const char* what) {
        if (!consume(c)) fail(std::string("expected '") + c + "' " + what);
    }
    bool at_end() {
        skip_ws();
        return pos_ == src_.size();
    }
    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

    std::string take_identifier() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

  private:
    ExprPtr multiplicative() {
        ExprPtr left = unary_expr();
        for (;;) {
            skip_ws();
            if (consume('*')) left = mul(left, unary_expr());
            else if (consume('/')) left = div(left, unary_expr());
            else return left;
        }
    }

    ExprPtr unary_expr() {
        skip_ws();
        if (consume('-')) return neg(unary_expr());
        return power();
    }

    ExprPtr power() {
        ExprPtr base = primary();
        skip_ws();
        if (consume('^')) return fdelab::pow(base, unary_expr());
        return base;
    }

    ExprPtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = additive();
            expect(')', "to close parenthesis");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail("expected a number, name or parenthesized expression");
    }

    ExprPtr number() {
        const char* begin = src_.data() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        return constant(v);
    }

    ExprPtr name() {
        std::size_t at = pos_;
        std::string id = take_identifier();
        if (id == "t") return time_var();
        if (id == "pi") return constant(M_PI);
        if (id == "inf") return constant(kInf);

        static const std::pair<const char*, ExprKind> unary_fns[] = {
            {"sin", ExprKind::Sin}, {"cos", ExprKind::Cos}, {"tan", ExprKind::Tan},
            {"exp", ExprKind::Exp}, {"ln", ExprKind::Ln},   {"abs", ExprKind::Abs},
        };
        for (const auto& [fname, kind] : unary_fns) {
            if (id == fname) {
                expect('(', "after function name");
                ExprPtr a = additive();
                expect(')', "to close argument list");
                return unary(kind, a);
            }
        }
        if (id == "min" || id == "max") {
            ExprKind kind = id == "min" ? ExprKind::Min : ExprKind::Max;
            expect('(', "after function name");
            ExprPtr a = additive();
            expect(',', "between arguments");
            ExprPtr b = additive();
            expect(')', "to close argument list");
            return binary(kind, a, b);
        }
        if (id == "ind") {
            expect('(', "after function name");
            double a = constant_bound();
            expect(',', "between arguments");
            double b = constant_bound();
            expect(')', "to close argument list");
            return indicator(a, b);
        }
        seek(at);
        fail("unknown identifier '" + id + "'");
    }

  public:
    // A bound must not depend on t; evaluated once at parse time.
    double constant_bound() {
        skip_ws();
        std::size_t at = pos_;
        ExprPtr e = additive();
        if (depends_on_time(*e)) { seek(at); fail("bound must be constant"); }
        return eval(*e, 0.0);
    }

  private:
    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Parse a plain (non-piecewise) expression.
inline ExprPtr parse_expr(std::string_view src) {
    detail::Parser p(src);
    return p.parse_expression();
}

// ---- piecewise functions ---------------------------------------------------

// An ordered list of pieces covering [bks_[0], bks_[m]]; evaluation uses the
// right-continuous convention at interior breakpoints. A plain expression is
// a single piece on (-inf, inf). Evaluation outside the declared domain is a
// domain error (NaN).
class PiecewiseFn {
  public:
    PiecewiseFn() : PiecewiseFn(constant(0.0)) {}

    explicit PiecewiseFn(ExprPtr single)
        : bks_{-kInf, kInf}, pieces_{std::move(single)} {}

    PiecewiseFn(std::vector<double> breakpoints, std::vector<ExprPtr> pieces)
        : bks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
        if (pieces_.empty() || bks_.size() != pieces_.size() + 1)
            throw std::invalid_argument("piecewise: breakpoints must bound the pieces");
        for (std::size_t i = 0; i + 1 < bks_.size(); ++i)
            if (!(bks_[i] < bks_[i + 1]))
                throw std::invalid_argument("piecewise: non-ascending breakpoints");
    }

    double operator()(double t) const {
        if (std::isnan(t) || t < bks_.front() || t > bks_.back()) return kNaN;
        return eval(*pieces_[piece_index(t)], t);
    }

    std::size_t piece_index(double t) const {
        std::size_t lo = 0, hi = bks_.size() - 1;
        // last breakpoint belongs to the final (closed) piece
        if (t >= bks_[hi]) return pieces_.size() - 1;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            if (t >= bks_[mid]) lo = mid; else hi = mid;
        }
        return lo;
    }

    double domain_lo() const { return bks_.front(); }
    double domain_hi() const { return bks_.back(); }
    std::size_t piece_count() const { return pieces_.size(); }
    const ExprPtr& piece(std::size_t i) const { return pieces_[i]; }
    const std::vector<double>& bounds() const { return bks_; }

    // Finite breakpoints (piece edges), used as quadrature panel boundaries
    // and integrator mesh points.
    std::vector<double> finite_breakpoints() const {
        std::vector<double> out;
        for (double b : bks_)
            if (std::isfinite(b)) out.push_back(b);
        return out;
    }

    bool single_unbounded_piece() const {
        return pieces_.size() == 1 && bks_.front() == -kInf && bks_.back() == kInf;
    }

  private:
    std::vector<double> bks_;
    std::vector<ExprPtr> pieces_;
};

// Parse either a plain expression or a `piecewise [a,b): e ; ...` block.
inline PiecewiseFn parse(std::string_view src) {
    detail::Parser p(src);
    p.skip_ws();
    std::size_t at = p.pos();
    std::string head = p.take_identifier();
    if (head != "piecewise") {
        p.seek(at);
        return PiecewiseFn(p.parse_expression());
    }

    std::vector<double> bks;
    std::vector<ExprPtr> pieces;
    for (;;) {
        p.expect('[', "to open piece interval");
        double lo = p.constant_bound();
        p.expect(',', "between interval bounds");
        double hi = p.constant_bound();
        bool closed_right = false;
        if (p.consume(']')) closed_right = true;
        else if (!p.consume(')')) p.fail("expected ')' or ']' to close interval");
        p.expect(':', "before piece expression");
        ExprPtr body = p.additive();

        if (!(lo < hi)) p.fail("non-ascending breakpoints");
        if (!bks.empty()) {
            double prev_hi = bks.back();
            if (std::fabs(lo - prev_hi) > 1e-12 * std::fmax(1.0, std::fabs(prev_hi)))
                p.fail("pieces must be contiguous");
            if (!(hi > prev_hi)) p.fail("non-ascending breakpoints");
        } else {
            bks.push_back(lo);
        }
        bks.push_back(hi);
        pieces.push_back(body);

        if (!p.consume(';')) break;
        (void)closed_right;
    }
    if (!p.at_end()) p.fail("unexpected trailing input");
    return PiecewiseFn(std::move(bks), std::move(pieces));
}

inline std::string print(const PiecewiseFn& f) {
    if (f.single_unbounded_piece()) return print(f.piece(0));
    std::string out = "piecewise ";
    for (std::size_t i = 0; i < f.piece_count(); ++i) {
        if (i) out += " ; ";
        bool last = i + 1 == f.piece_count();
        out += '[';
        out += detail::fmt_double(f.bounds()[i]);
        out += ", ";
        out += detail::fmt_double(f.bounds()[i + 1]);
        out += last ? "]" : ")";
        out += ": ";
        out += print(f.piece(i));
    }
    return out;
}

// Pointwise max with zero, applied piece by piece.
inline PiecewiseFn positive_part(const PiecewiseFn& f) {
    std::vector<ExprPtr> pieces;
    pieces.reserve(f.piece_count());
    for (std::size_t i = 0; i < f.piece_count(); ++i)
        pieces.push_back(binary(ExprKind::Max, constant(0.0), f.piece(i)));
    return PiecewiseFn(f.bounds(), std::move(pieces));
}

// ---- type-erased scalar function -------------------------------------------

// A callable with its known discontinuity/kink locations. Piecewise-defined
// expressions, numerically constructed coefficients and trajectory slices all
// flow through this one shape.
struct ScalarFn {
    std::function<double(double)> f;
    std::vector<double> breakpoints;  // finite, sorted

    double operator()(double t) const { return f(t); }
};

inline ScalarFn to_fn(const PiecewiseFn& p) {
    auto shared = std::make_shared<PiecewiseFn>(p);
    return ScalarFn{[shared](double t) { return (*shared)(t); }, shared->finite_breakpoints()};
}

inline ScalarFn to_fn(double c) {
    return ScalarFn{[c](double) { return c; }, {}};
}

}  // namespace fdelab
