#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metakit/error.hpp"

namespace metakit {

enum class JudgmentLevel { low, unclear, high };

inline std::string_view to_string(JudgmentLevel l) {
    switch (l) {
    case JudgmentLevel::low: return "low";
    case JudgmentLevel::unclear: return "unclear";
    case JudgmentLevel::high: return "high";
    }
    return "?";
}

inline std::optional<JudgmentLevel> parse_judgment_level(std::string_view s) {
    if (s == "low") return JudgmentLevel::low;
    if (s == "unclear") return JudgmentLevel::unclear;
    if (s == "high") return JudgmentLevel::high;
    return std::nullopt;
}

struct Judgment {
    JudgmentLevel level = JudgmentLevel::unclear;
    std::string support;

    bool operator==(const Judgment&) const = default;
};

struct BiasDomain {
    std::string id;
    std::string question;
    bool active = true;
    int order = 0;

    bool operator==(const BiasDomain&) const = default;
};

enum class DomainScheme { cochrane7, nos6 };

inline std::optional<DomainScheme> parse_scheme(std::string_view s) {
    if (s == "cochrane7") return DomainScheme::cochrane7;
    if (s == "nos6") return DomainScheme::nos6;
    return std::nullopt;
}

inline std::vector<BiasDomain> default_domains(DomainScheme scheme) {
    struct Entry {
        const char* id;
        const char* question;
    };
    static constexpr Entry cochrane[] = {
        {"random_sequence_generation", "Random sequence generation"},
        {"allocation_concealment", "Allocation concealment"},
        {"blinding_participants_personnel", "Blinding of participants and personnel"},
        {"blinding_assessors", "Blinding of outcome assessors"},
        {"incomplete_outcome_data", "Incomplete outcome data"},
        {"selective_reporting", "Selective reporting"},
        {"other_bias", "Other threats to validity"},
    };
    // Newcastle-Ottawa case-control items, reduced to six.
    static constexpr Entry nos[] = {
        {"case_definition", "Is the case definition adequate?"},
        {"case_representativeness", "Are the cases representative?"},
        {"control_definition", "Are the controls adequately defined?"},
        {"exposure_ascertainment", "Is the ascertainment of exposure adequate?"},
        {"same_ascertainment", "Is the same method of ascertainment used for cases and controls?"},
        {"non_response_rate", "Is the non-response rate acceptable?"},
    };
    std::vector<BiasDomain> out;
    auto fill = [&out](std::span<const Entry> entries) {
        int order = 0;
        for (const auto& e : entries) out.push_back({e.id, e.question, true, order++});
    };
    switch (scheme) {
    case DomainScheme::cochrane7: fill(cochrane); break;
    case DomainScheme::nos6: fill(nos); break;
    }
    return out;
}

inline std::vector<BiasDomain> default_domains(std::string_view scheme) {
    auto s = parse_scheme(scheme);
    if (!s) throw Error(ErrorCode::validation, "unknown risk-of-bias scheme '" + std::string(scheme) + "'");
    return default_domains(*s);
}

} // namespace metakit
