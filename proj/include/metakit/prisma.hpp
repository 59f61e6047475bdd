#pragma once

// PRISMA study-flow counts (four-phase template).

#include <cstdint>
#include <string>
#include <vector>

#include "metakit/error.hpp"

namespace metakit {

struct ExclusionReason {
    std::string reason;
    std::int64_t n = 0;

    bool operator==(const ExclusionReason&) const = default;
};

struct FlowDiagram {
    std::int64_t identified_db = 0;
    std::int64_t identified_other = 0;
    std::int64_t after_dedup = 0;
    std::int64_t screened = 0;
    std::int64_t excluded_screening = 0;
    std::int64_t fulltext_assessed = 0;
    std::vector<ExclusionReason> fulltext_excluded;
    std::int64_t qualitative_included = 0;
    std::int64_t quantitative_included = 0;

    std::int64_t identified() const { return identified_db + identified_other; }

    std::int64_t fulltext_excluded_total() const {
        std::int64_t total = 0;
        for (const auto& r : fulltext_excluded) total += r.n;
        return total;
    }

    bool operator==(const FlowDiagram&) const = default;
};

/// Returns the first violated relation, or an empty string when the counts
/// are consistent.
inline std::string flow_violation(const FlowDiagram& f) {
    const std::int64_t counts[] = {f.identified_db, f.identified_other, f.after_dedup,
                                   f.screened, f.excluded_screening, f.fulltext_assessed,
                                   f.qualitative_included, f.quantitative_included};
    for (auto c : counts) {
        if (c < 0) return "all counts >= 0";
    }
    for (const auto& r : f.fulltext_excluded) {
        if (r.n < 0) return "all counts >= 0";
    }
    if (f.identified() < f.after_dedup) return "identified_db + identified_other >= after_dedup";
    if (f.screened != f.after_dedup) return "screened = after_dedup";
    if (f.fulltext_assessed != f.screened - f.excluded_screening) {
        return "fulltext_assessed = screened - excluded_screening";
    }
    if (f.qualitative_included != f.fulltext_assessed - f.fulltext_excluded_total()) {
        return "qualitative_included = fulltext_assessed - sum(fulltext_excluded.n)";
    }
    if (f.quantitative_included > f.qualitative_included) {
        return "quantitative_included <= qualitative_included";
    }
    return {};
}

/// Validates the counts and returns them as a diagram. Throws a consistency
/// error naming the failing relation.
inline FlowDiagram build_flow(FlowDiagram counts) {
    if (auto v = flow_violation(counts); !v.empty()) {
        throw Error(ErrorCode::consistency, "PRISMA counts violate: " + v);
    }
    return counts;
}

} // namespace metakit
