#pragma once

// Distribution helpers shared by the effect-size and pooling code.

#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "metakit/error.hpp"

namespace metakit::stats {

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Two-sided p-value for a standard normal statistic.
inline double normal_two_sided_p(double z) {
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(ErrorCode::validation, "normal quantile requires p in (0,1)");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

// z such that a central interval of the given level is [-z, z].
inline double critical_z(double ci_level) {
    if (!(ci_level > 0.0 && ci_level < 1.0)) {
        throw Error(ErrorCode::validation, "confidence level must lie in (0,1)");
    }
    return normal_quantile(1.0 - (1.0 - ci_level) / 2.0);
}

// Upper tail P(X >= q) for X ~ chi-square(df).
inline double chi_square_upper(double q, int df) {
    if (df <= 0) return 1.0;
    if (!(q > 0.0)) return 1.0;
    if (std::isinf(q)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), q));
}

} // namespace metakit::stats
