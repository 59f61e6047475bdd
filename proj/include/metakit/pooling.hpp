#pragma once

// Fixed-effect (inverse variance, Mantel-Haenszel, Peto) and
// DerSimonian-Laird random-effects pooling of dichotomous outcomes.
//
// Every pooled quantity lives on the analysis scale (log for OR/RR, natural
// for RD). Studies that are not estimable for the chosen measure stay in
// `per_study` for display but never enter a sum.

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metakit/effect_measures.hpp"
#include "metakit/settings.hpp"
#include "metakit/stats.hpp"

namespace metakit {

struct StudyTable {
    std::string study_id;
    TwoByTwoTable table;
};

struct StudyEstimate {
    std::string study_id;
    EffectEstimate estimate;
};

struct Heterogeneity {
    double q = 0.0;
    int df = 0;
    double p_value = 1.0;
    double i_squared = 0.0;
    double tau_squared = 0.0;

    bool significant(double alpha = 0.1) const { return df > 0 && p_value < alpha; }
};

struct StudyResult {
    std::string study_id;
    EffectEstimate estimate;
    double weight_pct = 0.0;
    std::optional<TwoByTwoTable> table;
};

struct OverallTest {
    double z = 0.0;
    double p = 1.0;
    bool degenerate = false;
};

struct PooledResult {
    AnalysisSettings settings;
    std::vector<StudyResult> per_study;
    EffectEstimate pooled;
    Heterogeneity heterogeneity;
    double z = 0.0;
    double p_overall = 1.0;
    bool degenerate = false;
    int k = 0;

    bool estimable() const { return pooled.estimable && k >= 1; }
};

// Which fixed-effect analysis supplies Q for the DerSimonian-Laird tau^2.
enum class QSource { inverse_variance, mantel_haenszel };

/// z = value / se, two-sided normal p. A zero standard error is reported as
/// p = 0 with the degenerate flag set.
inline OverallTest overall_effect_test(const EffectEstimate& pooled) {
    OverallTest t;
    if (!pooled.estimable) return t;
    if (!(pooled.se > 0.0)) {
        t.z = pooled.analysis_value == 0.0 ? 0.0
                                           : std::copysign(std::numeric_limits<double>::infinity(),
                                                           pooled.analysis_value);
        t.p = 0.0;
        t.degenerate = true;
        return t;
    }
    t.z = pooled.analysis_value / pooled.se;
    t.p = stats::normal_two_sided_p(t.z);
    return t;
}

namespace detail {

inline bool iv_usable(const EffectEstimate& e) {
    return e.estimable && std::isfinite(e.analysis_value) && e.se > 0.0 && std::isfinite(e.se);
}

inline Heterogeneity finish_heterogeneity(double q, int contributing) {
    Heterogeneity h;
    h.df = contributing > 1 ? contributing - 1 : 0;
    if (h.df == 0) {
        return h;
    }
    h.q = q > 0.0 ? q : 0.0;
    h.p_value = stats::chi_square_upper(h.q, h.df);
    h.i_squared = h.q > 0.0 ? std::max(0.0, (h.q - h.df) / h.q) * 100.0 : 0.0;
    return h;
}

inline void attach_test(PooledResult& r) {
    const auto t = overall_effect_test(r.pooled);
    r.z = t.z;
    r.p_overall = t.p;
    r.degenerate = t.degenerate;
}

inline void normalise_weights(std::vector<StudyResult>& rows, const std::vector<double>& raw) {
    double total = 0.0;
    for (double w : raw) total += w;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].weight_pct = total > 0.0 ? raw[i] / total * 100.0 : 0.0;
    }
}

} // namespace detail

/// Cochran's Q about a fixed-effect centre using inverse-variance weights.
inline Heterogeneity heterogeneity(std::span<const StudyEstimate> estimates, double fixed_center) {
    double q = 0.0;
    int contributing = 0;
    for (const auto& s : estimates) {
        if (!detail::iv_usable(s.estimate)) continue;
        const double w = 1.0 / s.estimate.variance();
        const double dev = s.estimate.analysis_value - fixed_center;
        q += w * dev * dev;
        ++contributing;
    }
    return detail::finish_heterogeneity(q, contributing);
}

// Q for Peto pooling: sum of V_i * (theta_i - theta)^2 with theta_i = (O-E)_i / V_i.
inline Heterogeneity heterogeneity_peto(std::span<const PetoComponents> comps, double fixed_center) {
    double q = 0.0;
    int contributing = 0;
    for (const auto& c : comps) {
        if (!(c.v > 0.0)) continue;
        const double dev = c.o_minus_e / c.v - fixed_center;
        q += c.v * dev * dev;
        ++contributing;
    }
    return detail::finish_heterogeneity(q, contributing);
}

inline PooledResult pool_iv_fixed(std::span<const StudyEstimate> estimates, double ci_level = 0.95) {
    PooledResult r;
    r.settings.method = Method::inverse_variance;
    r.settings.model = Model::fixed;
    r.settings.ci_level = ci_level;
    Measure measure = estimates.empty() ? Measure::odds_ratio : estimates.front().estimate.measure;
    r.settings.measure = measure;

    std::vector<double> raw;
    double sum_w = 0.0;
    double sum_wy = 0.0;
    for (const auto& s : estimates) {
        if (s.estimate.measure != measure) {
            throw Error(ErrorCode::validation, "cannot pool estimates of different measures");
        }
        r.per_study.push_back({s.study_id, s.estimate, 0.0, std::nullopt});
        if (!detail::iv_usable(s.estimate)) {
            raw.push_back(0.0);
            continue;
        }
        const double w = 1.0 / s.estimate.variance();
        raw.push_back(w);
        sum_w += w;
        sum_wy += w * s.estimate.analysis_value;
        ++r.k;
    }
    detail::normalise_weights(r.per_study, raw);
    if (r.k == 0) {
        r.pooled = not_estimable(measure);
        return r;
    }
    const double theta = sum_wy / sum_w;
    r.pooled = make_estimate(measure, theta, 1.0 / std::sqrt(sum_w), ci_level);
    r.heterogeneity = heterogeneity(estimates, theta);
    detail::attach_test(r);
    return r;
}

/// Mantel-Haenszel pooling from the raw tables.
///
/// OR uses the Robins-Breslow-Greenland variance, RR and RD the
/// Greenland-Robins variances. OR/RR sums run over continuity-corrected cells
/// of the studies that need it; double-zero and double-full studies are
/// excluded. RD uses the raw counts and never excludes a study.
inline PooledResult pool_mh_fixed(std::span<const StudyTable> tables, Measure measure, double ci_level = 0.95) {
    PooledResult r;
    r.settings.method = Method::mantel_haenszel;
    r.settings.model = Model::fixed;
    r.settings.measure = measure;
    r.settings.ci_level = ci_level;

    std::vector<StudyEstimate> study_estimates;
    std::vector<double> raw;

    // OR: R, S and the four RBG sums. RR: numerator/denominator and variance numerator.
    double sum_r = 0, sum_s = 0, sum_pr = 0, sum_ps_qr = 0, sum_qs = 0;
    double rr_num = 0, rr_den = 0, rr_var = 0;
    double rd_num = 0, rd_w = 0, rd_var = 0;

    for (const auto& st : tables) {
        validate(st.table);
        auto est = estimate(st.table, measure, ci_level);
        study_estimates.push_back({st.study_id, est});
        r.per_study.push_back({st.study_id, est, 0.0, st.table});

        if (measure == Measure::risk_difference) {
            const auto x = cells_of(st.table);
            const double n1 = x.n1(), n2 = x.n2(), n = x.n();
            const double w = n1 * n2 / n;
            raw.push_back(w);
            rd_w += w;
            rd_num += (x.a * n2 - x.c * n1) / n;
            rd_var += (x.a * x.b * n2 * n2 * n2 + x.c * x.d * n1 * n1 * n1) / (n1 * n2 * n * n);
            ++r.k;
            continue;
        }

        const auto cc = continuity_correct(st.table);
        if (!cc.ratio_estimable) {
            raw.push_back(0.0);
            continue;
        }
        const auto& x = cc.cells;
        const double n1 = x.n1(), n2 = x.n2(), n = x.n();
        if (measure == Measure::odds_ratio) {
            const double ri = x.a * x.d / n;
            const double si = x.b * x.c / n;
            const double pi = (x.a + x.d) / n;
            const double qi = (x.b + x.c) / n;
            sum_r += ri;
            sum_s += si;
            sum_pr += pi * ri;
            sum_ps_qr += pi * si + qi * ri;
            sum_qs += qi * si;
            raw.push_back(si);
        } else {
            const double m1 = x.a + x.c;
            rr_num += x.a * n2 / n;
            rr_den += x.c * n1 / n;
            rr_var += (n1 * n2 * m1 - x.a * x.c * n) / (n * n);
            raw.push_back(x.c * n1 / n);
        }
        ++r.k;
    }
    detail::normalise_weights(r.per_study, raw);
    if (r.k == 0) {
        r.pooled = not_estimable(measure);
        return r;
    }

    double theta = 0, var = 0;
    switch (measure) {
    case Measure::odds_ratio:
        theta = std::log(sum_r / sum_s);
        var = sum_pr / (2 * sum_r * sum_r) + sum_ps_qr / (2 * sum_r * sum_s) + sum_qs / (2 * sum_s * sum_s);
        break;
    case Measure::risk_ratio:
        theta = std::log(rr_num / rr_den);
        var = rr_var / (rr_num * rr_den);
        break;
    case Measure::risk_difference:
        theta = rd_num / rd_w;
        var = rd_var / (rd_w * rd_w);
        break;
    }
    r.pooled = make_estimate(measure, theta, std::sqrt(std::max(0.0, var)), ci_level);
    if (r.pooled.estimable) {
        r.heterogeneity = heterogeneity(study_estimates, theta);
    }
    detail::attach_test(r);
    return r;
}

/// Peto one-step odds ratio: ln OR = sum(O-E) / sum(V), weights proportional to V.
inline PooledResult pool_peto_fixed(std::span<const StudyTable> tables, double ci_level = 0.95) {
    PooledResult r;
    r.settings.method = Method::peto;
    r.settings.model = Model::fixed;
    r.settings.measure = Measure::odds_ratio;
    r.settings.ci_level = ci_level;

    std::vector<PetoComponents> comps;
    std::vector<double> raw;
    double sum_oe = 0, sum_v = 0;
    for (const auto& st : tables) {
        const auto pc = peto_components(st.table);
        comps.push_back(pc);
        r.per_study.push_back({st.study_id, peto_odds_ratio(st.table, ci_level), 0.0, st.table});
        raw.push_back(pc.v > 0.0 ? pc.v : 0.0);
        if (pc.v > 0.0) {
            sum_oe += pc.o_minus_e;
            sum_v += pc.v;
            ++r.k;
        }
    }
    detail::normalise_weights(r.per_study, raw);
    if (!(sum_v > 0.0)) {
        r.pooled = not_estimable(Measure::odds_ratio);
        r.k = 0;
        return r;
    }
    const double theta = sum_oe / sum_v;
    r.pooled = make_estimate(Measure::odds_ratio, theta, 1.0 / std::sqrt(sum_v), ci_level);
    r.heterogeneity = heterogeneity_peto(comps, theta);
    detail::attach_test(r);
    return r;
}

/// DerSimonian-Laird random effects. `fixed_q` is Cochran's Q from whichever
/// fixed-effect analysis was designated; the moment denominator always uses
/// inverse-variance weights.
inline PooledResult pool_random_dl(std::span<const StudyEstimate> estimates, double fixed_q, double ci_level) {
    PooledResult r;
    r.settings.method = Method::inverse_variance;
    r.settings.model = Model::random;
    r.settings.ci_level = ci_level;
    const Measure measure = estimates.empty() ? Measure::odds_ratio : estimates.front().estimate.measure;
    r.settings.measure = measure;

    double sum_w = 0, sum_w2 = 0;
    int usable = 0;
    for (const auto& s : estimates) {
        if (s.estimate.measure != measure) {
            throw Error(ErrorCode::validation, "cannot pool estimates of different measures");
        }
        if (!detail::iv_usable(s.estimate)) continue;
        const double w = 1.0 / s.estimate.variance();
        sum_w += w;
        sum_w2 += w * w;
        ++usable;
    }
    auto h = detail::finish_heterogeneity(fixed_q, usable);
    if (usable > 1) {
        const double denom = sum_w - sum_w2 / sum_w;
        h.tau_squared = denom > 0.0 ? std::max(0.0, (h.q - h.df) / denom) : 0.0;
    }

    std::vector<double> raw;
    double sum_ws = 0, sum_wsy = 0;
    for (const auto& s : estimates) {
        r.per_study.push_back({s.study_id, s.estimate, 0.0, std::nullopt});
        if (!detail::iv_usable(s.estimate)) {
            raw.push_back(0.0);
            continue;
        }
        const double w = 1.0 / (s.estimate.variance() + h.tau_squared);
        raw.push_back(w);
        sum_ws += w;
        sum_wsy += w * s.estimate.analysis_value;
        ++r.k;
    }
    detail::normalise_weights(r.per_study, raw);
    r.heterogeneity = h;
    if (r.k == 0) {
        r.pooled = not_estimable(measure);
        return r;
    }
    r.pooled = make_estimate(measure, sum_wsy / sum_ws, 1.0 / std::sqrt(sum_ws), ci_level);
    detail::attach_test(r);
    return r;
}

// DL with Q taken from the inverse-variance fixed-effect fit.
inline PooledResult pool_random_dl(std::span<const StudyEstimate> estimates, double ci_level = 0.95) {
    const auto fixed = pool_iv_fixed(estimates, ci_level);
    return pool_random_dl(estimates, fixed.heterogeneity.q, ci_level);
}

inline std::vector<StudyEstimate> study_estimates(std::span<const StudyTable> tables, Measure m,
                                                  double ci_level = 0.95) {
    std::vector<StudyEstimate> out;
    out.reserve(tables.size());
    for (const auto& st : tables) out.push_back({st.study_id, estimate(st.table, m, ci_level)});
    return out;
}

/// Runs the analysis an outcome's settings describe. For random effects the
/// Q statistic comes from `q_source`, defaulting to the fixed-effect method
/// named in the settings.
inline PooledResult analyze(std::span<const StudyTable> tables, const AnalysisSettings& settings,
                            std::optional<QSource> q_source = std::nullopt) {
    validate(settings);
    PooledResult r;
    if (settings.method == Method::peto) {
        r = pool_peto_fixed(tables, settings.ci_level);
    } else if (settings.model == Model::fixed) {
        if (settings.method == Method::mantel_haenszel) {
            r = pool_mh_fixed(tables, settings.measure, settings.ci_level);
        } else {
            const auto est = study_estimates(tables, settings.measure, settings.ci_level);
            r = pool_iv_fixed(est, settings.ci_level);
        }
    } else {
        const QSource source = q_source.value_or(settings.method == Method::mantel_haenszel
                                                     ? QSource::mantel_haenszel
                                                     : QSource::inverse_variance);
        const auto est = study_estimates(tables, settings.measure, settings.ci_level);
        const double q = source == QSource::mantel_haenszel
                             ? pool_mh_fixed(tables, settings.measure, settings.ci_level).heterogeneity.q
                             : pool_iv_fixed(est, settings.ci_level).heterogeneity.q;
        r = pool_random_dl(est, q, settings.ci_level);
    }
    r.settings = settings;
    for (std::size_t i = 0; i < r.per_study.size() && i < tables.size(); ++i) {
        r.per_study[i].table = tables[i].table;
    }
    if (r.per_study.empty()) r.settings.measure = settings.measure;
    if (!r.pooled.estimable) r.pooled.measure = settings.measure;
    return r;
}

} // namespace metakit
