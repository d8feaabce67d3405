#pragma once

// Verdict and hypothesis-check vocabulary shared by the comparison verifiers
// and the criterion checkers.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"

namespace fdelab {

enum class CheckStatus { Verified, Violated, NotVerifiable };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Verified: return "verified";
        case CheckStatus::Violated: return "violated";
        case CheckStatus::NotVerifiable: return "not-verifiable";
    }
    return "?";
}

struct HypothesisCheck {
    std::string id;
    CheckStatus status = CheckStatus::NotVerifiable;
    double worst_point = kNaN;
    double margin = kNaN;
    std::string note;
};

enum class VerdictTag {
    CertifiedOscillatory,
    CertifiedNonoscillatory,
    NumericOscillatory,
    NumericNonoscillatory,
    Inconclusive,
};

inline const char* to_string(VerdictTag v) {
    switch (v) {
        case VerdictTag::CertifiedOscillatory: return "certified-oscillatory";
        case VerdictTag::CertifiedNonoscillatory: return "certified-nonoscillatory";
        case VerdictTag::NumericOscillatory: return "numeric-oscillatory";
        case VerdictTag::NumericNonoscillatory: return "numeric-nonoscillatory";
        case VerdictTag::Inconclusive: return "inconclusive";
    }
    return "?";
}

// Certified* verdicts are produced only by the criterion checkers with every
// hypothesis verified; Numeric* verdicts always carry their finite horizon.
struct OscillationVerdict {
    VerdictTag tag = VerdictTag::Inconclusive;
    std::optional<double> horizon;

    static OscillationVerdict certified_oscillatory() {
        return {VerdictTag::CertifiedOscillatory, std::nullopt};
    }
    static OscillationVerdict certified_nonoscillatory() {
        return {VerdictTag::CertifiedNonoscillatory, std::nullopt};
    }
    static OscillationVerdict numeric_oscillatory(double h) {
        return {VerdictTag::NumericOscillatory, h};
    }
    static OscillationVerdict numeric_nonoscillatory(double h) {
        return {VerdictTag::NumericNonoscillatory, h};
    }
    static OscillationVerdict inconclusive() { return {VerdictTag::Inconclusive, std::nullopt}; }
};

inline constexpr double kGridStep = 1e-2;    // hypothesis-check sampling step
inline constexpr double kGridSlack = 1e-12;  // slack allowed on inequality checks

// min of g over a uniform grid, as a Verified/Violated check on g >= 0.
// A sample that is not evaluable (NaN) makes the claim not verifiable.
template <class G>
inline HypothesisCheck check_nonnegative(const std::string& id, const G& g, double lo, double hi,
                                         double step = kGridStep, double slack = kGridSlack) {
    HypothesisCheck out;
    out.id = id;
    const long n = std::max(2L, std::lround(std::ceil((hi - lo) / step)));
    double worst = kInf, worst_t = lo;
    for (long i = 0; i <= n; ++i) {
        const double t = lo + (hi - lo) * double(i) / double(n);
        const double v = g(t);
        if (std::isnan(v)) {
            out.margin = kNaN;
            out.worst_point = t;
            out.status = CheckStatus::NotVerifiable;
            out.note = "not evaluable at the reported point";
            return out;
        }
        if (v < worst) { worst = v; worst_t = t; }
    }
    out.margin = worst;
    out.worst_point = worst_t;
    out.status = worst >= -slack ? CheckStatus::Verified : CheckStatus::Violated;
    return out;
}

inline bool all_verified(const std::vector<HypothesisCheck>& checks) {
    for (const auto& c : checks)
        if (c.status != CheckStatus::Verified) return false;
    return true;
}

}  // namespace fdelab
