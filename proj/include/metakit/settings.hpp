#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "metakit/error.hpp"

namespace metakit {

enum class Measure { odds_ratio, risk_ratio, risk_difference };
enum class Method { mantel_haenszel, inverse_variance, peto };
enum class Model { fixed, random };
enum class Totals { none, totals_only, totals_and_subtotals };

namespace detail {

template <typename E, std::size_t N>
struct EnumNames {
    std::array<std::pair<E, std::string_view>, N> entries;

    std::string_view name(E value) const {
        for (const auto& [e, n] : entries) {
            if (e == value) return n;
        }
        return "?";
    }

    std::optional<E> parse(std::string_view text) const {
        for (const auto& [e, n] : entries) {
            if (n == text) return e;
        }
        return std::nullopt;
    }
};

inline constexpr EnumNames<Measure, 3> measure_names{{{
    {Measure::odds_ratio, "odds_ratio"},
    {Measure::risk_ratio, "risk_ratio"},
    {Measure::risk_difference, "risk_difference"},
}}};

inline constexpr EnumNames<Method, 3> method_names{{{
    {Method::mantel_haenszel, "mantel_haenszel"},
    {Method::inverse_variance, "inverse_variance"},
    {Method::peto, "peto"},
}}};

inline constexpr EnumNames<Model, 2> model_names{{{
    {Model::fixed, "fixed"},
    {Model::random, "random"},
}}};

inline constexpr EnumNames<Totals, 3> totals_names{{{
    {Totals::none, "none"},
    {Totals::totals_only, "totals_only"},
    {Totals::totals_and_subtotals, "totals_and_subtotals"},
}}};

} // namespace detail

inline std::string_view to_string(Measure m) { return detail::measure_names.name(m); }
inline std::string_view to_string(Method m) { return detail::method_names.name(m); }
inline std::string_view to_string(Model m) { return detail::model_names.name(m); }
inline std::string_view to_string(Totals t) { return detail::totals_names.name(t); }

inline std::optional<Measure> parse_measure(std::string_view s) { return detail::measure_names.parse(s); }
inline std::optional<Method> parse_method(std::string_view s) { return detail::method_names.parse(s); }
inline std::optional<Model> parse_model(std::string_view s) { return detail::model_names.parse(s); }
inline std::optional<Totals> parse_totals(std::string_view s) { return detail::totals_names.parse(s); }

// Short label used in figures and reports.
inline std::string_view abbreviation(Measure m) {
    switch (m) {
    case Measure::odds_ratio: return "OR";
    case Measure::risk_ratio: return "RR";
    case Measure::risk_difference: return "RD";
    }
    return "?";
}

inline std::string_view display_name(Method m) {
    switch (m) {
    case Method::mantel_haenszel: return "M-H";
    case Method::inverse_variance: return "IV";
    case Method::peto: return "Peto";
    }
    return "?";
}

// Ratio measures are analysed on the log scale.
inline bool is_ratio(Measure m) { return m != Measure::risk_difference; }

struct AnalysisSettings {
    Method method = Method::mantel_haenszel;
    Model model = Model::fixed;
    Measure measure = Measure::odds_ratio;
    double ci_level = 0.95;
    Totals totals = Totals::totals_and_subtotals;

    bool operator==(const AnalysisSettings&) const = default;
};

/// Rejects combinations the pooling engine cannot honour: Peto pooling is a
/// fixed-effect odds-ratio method only.
inline void validate(const AnalysisSettings& s) {
    if (!(s.ci_level > 0.0 && s.ci_level < 1.0)) {
        throw Error(ErrorCode::validation, "ci_level must lie strictly between 0 and 1");
    }
    if (s.method == Method::peto) {
        if (s.measure != Measure::odds_ratio) {
            throw Error(ErrorCode::validation, "Peto method requires the odds ratio measure");
        }
        if (s.model != Model::fixed) {
            throw Error(ErrorCode::validation, "Peto method requires the fixed-effect model");
        }
    }
}

} // namespace metakit
