#pragma once

// Per-study effect sizes from a 2x2 table.
//
// Group 1 is the experimental arm (first group label), group 2 the control
// arm. Cells follow the usual layout:
//
//              events   non-events
//   group 1      a          b        n1
//   group 2      c          d        n2
//
// Ratio measures (OR, RR) carry their standard error on the log scale; RD is
// analysed on its natural scale.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "metakit/error.hpp"
#include "metakit/settings.hpp"
#include "metakit/stats.hpp"

namespace metakit {

struct TwoByTwoTable {
    std::int64_t events1 = 0;
    std::int64_t total1 = 0;
    std::int64_t events2 = 0;
    std::int64_t total2 = 0;

    std::int64_t a() const { return events1; }
    std::int64_t b() const { return total1 - events1; }
    std::int64_t c() const { return events2; }
    std::int64_t d() const { return total2 - events2; }
    std::int64_t n() const { return total1 + total2; }

    bool operator==(const TwoByTwoTable&) const = default;
};

inline bool is_valid(const TwoByTwoTable& t) {
    return t.total1 >= 1 && t.total2 >= 1 && t.events1 >= 0 && t.events2 >= 0 &&
           t.events1 <= t.total1 && t.events2 <= t.total2;
}

inline void validate(const TwoByTwoTable& t) {
    if (!is_valid(t)) {
        throw Error(ErrorCode::validation,
                    "invalid 2x2 table: need 0 <= events <= total and total >= 1 in both groups (got " +
                        std::to_string(t.events1) + "/" + std::to_string(t.total1) + ", " +
                        std::to_string(t.events2) + "/" + std::to_string(t.total2) + ")");
    }
}

// The same study seen from the other arm.
inline TwoByTwoTable swapped(const TwoByTwoTable& t) {
    return {t.events2, t.total2, t.events1, t.total1};
}

struct Cells {
    double a = 0, b = 0, c = 0, d = 0;

    double n1() const { return a + b; }
    double n2() const { return c + d; }
    double n() const { return a + b + c + d; }

    bool operator==(const Cells&) const = default;
};

inline Cells cells_of(const TwoByTwoTable& t) {
    return {static_cast<double>(t.a()), static_cast<double>(t.b()), static_cast<double>(t.c()),
            static_cast<double>(t.d())};
}

struct ContinuityResult {
    Cells cells;
    bool corrected = false;
    // False when both arms have no events or both arms are all events:
    // such a study carries no information about OR or RR.
    bool ratio_estimable = true;
};

inline constexpr double kContinuityIncrement = 0.5;

inline ContinuityResult continuity_correct(const TwoByTwoTable& t) {
    ContinuityResult r{cells_of(t), false, true};
    const bool double_zero = t.a() == 0 && t.c() == 0;
    const bool double_full = t.b() == 0 && t.d() == 0;
    if (double_zero || double_full) {
        r.ratio_estimable = false;
        return r;
    }
    if (t.a() == 0 || t.b() == 0 || t.c() == 0 || t.d() == 0) {
        r.cells.a += kContinuityIncrement;
        r.cells.b += kContinuityIncrement;
        r.cells.c += kContinuityIncrement;
        r.cells.d += kContinuityIncrement;
        r.corrected = true;
    }
    return r;
}

struct EffectEstimate {
    Measure measure = Measure::odds_ratio;
    double point = std::numeric_limits<double>::quiet_NaN();
    double analysis_value = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    double ci_low = std::numeric_limits<double>::quiet_NaN();
    double ci_high = std::numeric_limits<double>::quiet_NaN();
    bool corrected = false;
    bool estimable = false;

    double variance() const { return se * se; }
};

inline EffectEstimate not_estimable(Measure m, bool corrected = false) {
    EffectEstimate e;
    e.measure = m;
    e.corrected = corrected;
    return e;
}

/// Builds an estimate from its analysis-scale value and standard error.
/// Ratio measures are back-transformed with exp; risk differences keep the
/// natural scale and have their interval clamped to [-1, 1].
inline EffectEstimate make_estimate(Measure m, double analysis_value, double se, double ci_level,
                                    bool corrected = false) {
    if (!std::isfinite(analysis_value) || !std::isfinite(se) || se < 0.0) {
        return not_estimable(m, corrected);
    }
    const double z = stats::critical_z(ci_level);
    EffectEstimate e;
    e.measure = m;
    e.analysis_value = analysis_value;
    e.se = se;
    e.corrected = corrected;
    e.estimable = true;
    const double lo = analysis_value - z * se;
    const double hi = analysis_value + z * se;
    if (is_ratio(m)) {
        e.point = std::exp(analysis_value);
        e.ci_low = std::exp(lo);
        e.ci_high = std::exp(hi);
    } else {
        e.point = analysis_value;
        e.ci_low = std::clamp(lo, -1.0, 1.0);
        e.ci_high = std::clamp(hi, -1.0, 1.0);
    }
    return e;
}

inline EffectEstimate odds_ratio(const TwoByTwoTable& t, double ci_level = 0.95) {
    validate(t);
    const auto cc = continuity_correct(t);
    if (!cc.ratio_estimable) return not_estimable(Measure::odds_ratio);
    const auto& x = cc.cells;
    const double log_or = std::log((x.a * x.d) / (x.b * x.c));
    const double se = std::sqrt(1.0 / x.a + 1.0 / x.b + 1.0 / x.c + 1.0 / x.d);
    return make_estimate(Measure::odds_ratio, log_or, se, ci_level, cc.corrected);
}

inline EffectEstimate risk_ratio(const TwoByTwoTable& t, double ci_level = 0.95) {
    validate(t);
    const auto cc = continuity_correct(t);
    if (!cc.ratio_estimable) return not_estimable(Measure::risk_ratio);
    const auto& x = cc.cells;
    const double n1 = x.n1();
    const double n2 = x.n2();
    const double log_rr = std::log((x.a / n1) / (x.c / n2));
    // Rounding can push the variance a hair below zero when both arms are
    // nearly all events.
    const double var = std::max(0.0, 1.0 / x.a - 1.0 / n1 + 1.0 / x.c - 1.0 / n2);
    return make_estimate(Measure::risk_ratio, log_rr, std::sqrt(var), ci_level, cc.corrected);
}

inline EffectEstimate risk_difference(const TwoByTwoTable& t, double ci_level = 0.95) {
    validate(t);
    const double n1 = static_cast<double>(t.total1);
    const double n2 = static_cast<double>(t.total2);
    const double p1 = static_cast<double>(t.events1) / n1;
    const double p2 = static_cast<double>(t.events2) / n2;
    const double se = std::sqrt(p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2);
    return make_estimate(Measure::risk_difference, p1 - p2, se, ci_level);
}

struct PetoComponents {
    double o_minus_e = 0.0;
    double v = 0.0;
};

// Observed-minus-expected events in group 1 and the hypergeometric variance,
// computed on the raw counts.
inline PetoComponents peto_components(const TwoByTwoTable& t) {
    validate(t);
    const auto x = cells_of(t);
    const double n1 = x.n1();
    const double n2 = x.n2();
    const double n = x.n();
    const double m1 = x.a + x.c;
    const double m2 = x.b + x.d;
    PetoComponents pc;
    pc.o_minus_e = x.a - n1 * m1 / n;
    pc.v = n > 1.0 ? n1 * n2 * m1 * m2 / (n * n * (n - 1.0)) : 0.0;
    return pc;
}

inline EffectEstimate peto_odds_ratio(const TwoByTwoTable& t, double ci_level = 0.95) {
    const auto pc = peto_components(t);
    if (!(pc.v > 0.0)) return not_estimable(Measure::odds_ratio);
    return make_estimate(Measure::odds_ratio, pc.o_minus_e / pc.v, 1.0 / std::sqrt(pc.v), ci_level);
}

inline EffectEstimate estimate(const TwoByTwoTable& t, Measure m, double ci_level = 0.95) {
    switch (m) {
    case Measure::odds_ratio: return odds_ratio(t, ci_level);
    case Measure::risk_ratio: return risk_ratio(t, ci_level);
    case Measure::risk_difference: return risk_difference(t, ci_level);
    }
    return not_estimable(m);
}

} // namespace metakit
