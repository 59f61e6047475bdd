#pragma once

// Publication-bias diagnostics: funnel-plot data and Duval-Tweedie
// trim-and-fill with the L0 estimator.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "metakit/error.hpp"
#include "metakit/pooling.hpp"
#include "metakit/stats.hpp"

namespace metakit {

struct FunnelPoint {
    std::string study_id;
    double effect = 0.0; // analysis scale
    double se = 0.0;
};

struct FunnelData {
    Measure measure = Measure::odds_ratio;
    std::vector<FunnelPoint> points;
    std::vector<FunnelPoint> imputed;
    double pooled_line = 0.0;
    double z = 1.959963984540054;

    // Pseudo confidence limits at a given standard error.
    double boundary_low(double se) const { return pooled_line - z * se; }
    double boundary_high(double se) const { return pooled_line + z * se; }
};

inline FunnelData funnel_data(const PooledResult& pooled) {
    FunnelData f;
    f.measure = pooled.settings.measure;
    f.pooled_line = pooled.pooled.analysis_value;
    f.z = stats::critical_z(pooled.settings.ci_level);
    for (const auto& s : pooled.per_study) {
        if (!s.estimate.estimable || !std::isfinite(s.estimate.se)) continue;
        f.points.push_back({s.study_id, s.estimate.analysis_value, s.estimate.se});
    }
    return f;
}

enum class TrimSide {
    right, // excess studies on the right, missing ones filled on the left
    left,
};

struct TrimFillOptions {
    double ci_level = 0.95;
    Model model = Model::fixed;
    TrimSide side = TrimSide::right;
    int max_iterations = 50;
};

struct ImputedPoint {
    double effect = 0.0;
    double se = 0.0;
};

struct TrimFillResult {
    int imputed_count = 0;
    std::vector<ImputedPoint> imputed_points;
    PooledResult adjusted;
    int iterations = 0;
    double center = 0.0; // final fixed-effect centre of the trimmed set
};

class TrimFillError : public Error {
public:
    TrimFillError(const std::string& message, TrimFillResult last)
        : Error(ErrorCode::non_convergence, message), last_(std::move(last)) {}

    const TrimFillResult& last_iterate() const noexcept { return last_; }

private:
    TrimFillResult last_;
};

namespace detail {

// Ranks of |values| (1-based, ties averaged). Values within `tol` of each
// other count as tied so mirrored pairs rank together despite rounding.
inline std::vector<double> abs_ranks(std::span<const double> values, double tol) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return std::fabs(values[i]) < std::fabs(values[j]); });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && std::fabs(values[idx[j]]) - std::fabs(values[idx[i]]) <= tol) ++j;
        const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t t = i; t < j; ++t) ranks[idx[t]] = avg;
        i = j;
    }
    return ranks;
}

inline PooledResult pool_for_model(std::span<const StudyEstimate> est, Model model, double ci_level) {
    return model == Model::random ? pool_random_dl(est, ci_level) : pool_iv_fixed(est, ci_level);
}

} // namespace detail

/// L0 estimate of the number of suppressed studies given deviations from the
/// current centre: (4*T - n(n+1)) / (2n - 1), where T is the sum of the ranks
/// of |deviation| over the positive deviations.
inline double l0_estimator(std::span<const double> deviations) {
    const auto n = static_cast<double>(deviations.size());
    double scale = 0.0;
    for (double d : deviations) scale = std::max(scale, std::fabs(d));
    const double tol = 1e-9 * std::max(scale, 1e-12);
    const auto ranks = detail::abs_ranks(deviations, tol);
    double t = 0.0;
    for (std::size_t i = 0; i < deviations.size(); ++i) {
        if (deviations[i] > tol) t += ranks[i];
    }
    return (4.0 * t - n * (n + 1.0)) / (2.0 * n - 1.0);
}

/// Iteratively trims the ceil(L0) most extreme studies on the suspected side,
/// re-centres on the rest, and repeats until the trimmed count stabilises.
/// Mirror images of the trimmed studies about the final centre are then added
/// and the augmented set is pooled under `opts.model`.
///
/// Fewer than three estimable studies: nothing is imputed.
/// Throws TrimFillError (carrying the last iterate) on non-convergence.
inline TrimFillResult trim_and_fill(std::span<const StudyEstimate> estimates, const TrimFillOptions& opts = {}) {
    TrimFillResult result;
    const double sign = opts.side == TrimSide::right ? 1.0 : -1.0;

    std::vector<double> ys, vars;
    for (const auto& s : estimates) {
        if (!detail::iv_usable(s.estimate)) continue;
        ys.push_back(sign * s.estimate.analysis_value);
        vars.push_back(s.estimate.variance());
    }
    const std::size_t k = ys.size();
    if (k < 3) {
        result.adjusted = detail::pool_for_model(estimates, opts.model, opts.ci_level);
        result.center = result.adjusted.pooled.analysis_value;
        return result;
    }

    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return ys[i] < ys[j]; });

    const int max_trim = static_cast<int>((k - 1) / 2);
    int k0 = 0;
    double center = 0.0;
    bool converged = false;
    std::vector<double> dev(k);
    for (int iter = 1; iter <= opts.max_iterations; ++iter) {
        result.iterations = iter;
        double sw = 0, swy = 0;
        for (std::size_t r = 0; r < k - static_cast<std::size_t>(k0); ++r) {
            const double w = 1.0 / vars[order[r]];
            sw += w;
            swy += w * ys[order[r]];
        }
        center = swy / sw;
        for (std::size_t i = 0; i < k; ++i) dev[i] = ys[i] - center;
        const double l0 = l0_estimator(dev);
        const int next = std::clamp(static_cast<int>(std::ceil(l0)), 0, max_trim);
        if (next == k0) {
            converged = true;
            break;
        }
        k0 = next;
    }

    result.imputed_count = k0;
    result.center = sign * center;
    for (int t = 0; t < k0; ++t) {
        const std::size_t i = order[k - 1 - static_cast<std::size_t>(t)];
        result.imputed_points.push_back({sign * (2.0 * center - ys[i]), std::sqrt(vars[i])});
    }

    if (k0 == 0) {
        result.adjusted = detail::pool_for_model(estimates, opts.model, opts.ci_level);
    } else {
        std::vector<StudyEstimate> augmented(estimates.begin(), estimates.end());
        const Measure m = estimates.front().estimate.measure;
        int n = 0;
        for (const auto& p : result.imputed_points) {
            augmented.push_back({"Imputed " + std::to_string(++n), make_estimate(m, p.effect, p.se, opts.ci_level)});
        }
        result.adjusted = detail::pool_for_model(augmented, opts.model, opts.ci_level);
    }

    if (!converged) {
        throw TrimFillError("trim-and-fill did not converge after " + std::to_string(opts.max_iterations) +
                                " iterations",
                            std::move(result));
    }
    return result;
}

inline TrimFillResult trim_and_fill(std::span<const StudyEstimate> estimates, double ci_level) {
    TrimFillOptions opts;
    opts.ci_level = ci_level;
    return trim_and_fill(estimates, opts);
}

// Funnel data including the imputed trim-and-fill studies.
inline FunnelData funnel_data(const PooledResult& pooled, const TrimFillResult& tf) {
    auto f = funnel_data(pooled);
    int n = 0;
    for (const auto& p : tf.imputed_points) {
        f.imputed.push_back({"Imputed " + std::to_string(++n), p.effect, p.se});
    }
    return f;
}

} // namespace metakit
