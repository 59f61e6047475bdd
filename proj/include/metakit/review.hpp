#pragma once

// The review document: studies, references, comparisons/outcomes with their
// 2x2 data, risk-of-bias domains and the PRISMA flow.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metakit/effect_measures.hpp"
#include "metakit/error.hpp"
#include "metakit/pooling.hpp"
#include "metakit/prisma.hpp"
#include "metakit/rob_types.hpp"
#include "metakit/settings.hpp"

namespace metakit {

using Timestamp = std::chrono::sys_seconds;

enum class DataSource { published, unpublished, both };

inline std::string_view to_string(DataSource s) {
    switch (s) {
    case DataSource::published: return "published";
    case DataSource::unpublished: return "unpublished";
    case DataSource::both: return "both";
    }
    return "?";
}

inline std::optional<DataSource> parse_data_source(std::string_view s) {
    if (s == "published") return DataSource::published;
    if (s == "unpublished") return DataSource::unpublished;
    if (s == "both") return DataSource::both;
    return std::nullopt;
}

struct Characteristics {
    std::string methods;
    std::string participants;
    std::string interventions;
    std::string outcomes;
    std::string notes;

    bool operator==(const Characteristics&) const = default;
};

struct Study {
    std::string id; // conventionally "FirstAuthor Year"
    DataSource data_source = DataSource::published;
    int year = 2000;
    Characteristics characteristics;
    std::map<std::string, Judgment> rob_judgments; // keyed by domain id

    bool operator==(const Study&) const = default;
};

struct Reference {
    std::vector<std::string> authors;
    std::string title;
    std::string journal;
    std::optional<int> year;
    std::optional<std::string> volume;
    std::optional<std::string> pages;
    std::map<std::string, std::string> identifiers; // e.g. PMID, DOI

    std::optional<std::string> pmid() const {
        if (auto it = identifiers.find("PMID"); it != identifiers.end()) return it->second;
        return std::nullopt;
    }

    bool operator==(const Reference&) const = default;
};

struct StudyData {
    std::string study_id;
    TwoByTwoTable table;

    bool operator==(const StudyData&) const = default;
};

enum class DataType { dichotomous };

struct Outcome {
    std::string name;
    DataType data_type = DataType::dichotomous;
    std::pair<std::string, std::string> group_labels{"Experimental", "Control"};
    std::pair<std::string, std::string> graph_labels{"Favours control", "Favours experimental"};
    AnalysisSettings settings;
    std::vector<StudyData> rows;

    const StudyData* find_row(std::string_view study_id) const {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const StudyData& r) { return r.study_id == study_id; });
        return it == rows.end() ? nullptr : &*it;
    }

    std::vector<StudyTable> tables() const {
        std::vector<StudyTable> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back({r.study_id, r.table});
        return out;
    }

    bool operator==(const Outcome&) const = default;
};

struct Comparison {
    std::string name;
    std::vector<Outcome> outcomes;

    bool operator==(const Comparison&) const = default;
};

struct Review {
    std::string title;
    std::vector<Study> studies;
    std::vector<Reference> included_refs;
    std::vector<Reference> pending_refs;
    std::vector<Comparison> comparisons;
    std::vector<BiasDomain> rob_domains;
    std::optional<FlowDiagram> flow;
    Timestamp created{};
    Timestamp modified{};

    const Study* find_study(std::string_view id) const {
        auto it = std::find_if(studies.begin(), studies.end(), [&](const Study& s) { return s.id == id; });
        return it == studies.end() ? nullptr : &*it;
    }
    Study* find_study(std::string_view id) {
        return const_cast<Study*>(std::as_const(*this).find_study(id));
    }

    const BiasDomain* find_domain(std::string_view id) const {
        auto it = std::find_if(rob_domains.begin(), rob_domains.end(), [&](const BiasDomain& d) { return d.id == id; });
        return it == rob_domains.end() ? nullptr : &*it;
    }
    BiasDomain* find_domain(std::string_view id) {
        return const_cast<BiasDomain*>(std::as_const(*this).find_domain(id));
    }

    bool operator==(const Review&) const = default;
};

inline Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

// YYYY-MM-DDTHH:MM:SSZ
inline std::string format_timestamp(Timestamp t) {
    const std::time_t tt = t.time_since_epoch().count();
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    using namespace std::chrono;
    int y, mo, d, h, mi, sec;
    char z = 0;
    const std::string str(s);
    if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &sec, &z) != 7 || z != 'Z') {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 || sec > 60) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

inline Review new_review(std::string title) {
    if (title.empty()) throw Error(ErrorCode::validation, "review title must not be empty");
    Review r;
    r.title = std::move(title);
    r.created = r.modified = now_utc();
    return r;
}

inline void validate(const Study& s) {
    if (s.id.empty()) throw Error(ErrorCode::validation, "study id must not be empty");
    if (s.year < 1800 || s.year > 2100) {
        throw Error(ErrorCode::validation, "study '" + s.id + "': year " + std::to_string(s.year) + " outside [1800, 2100]");
    }
}

inline Study& add_study(Review& review, std::string id, DataSource source, int year) {
    Study s;
    s.id = std::move(id);
    s.data_source = source;
    s.year = year;
    validate(s);
    if (review.find_study(s.id)) throw Error(ErrorCode::conflict, "study '" + s.id + "' already exists");
    review.studies.push_back(std::move(s));
    return review.studies.back();
}

inline Comparison* find_comparison(Review& r, std::string_view name) {
    auto it = std::find_if(r.comparisons.begin(), r.comparisons.end(), [&](const Comparison& c) { return c.name == name; });
    return it == r.comparisons.end() ? nullptr : &*it;
}

inline Outcome* find_outcome(Comparison& c, std::string_view name) {
    auto it = std::find_if(c.outcomes.begin(), c.outcomes.end(), [&](const Outcome& o) { return o.name == name; });
    return it == c.outcomes.end() ? nullptr : &*it;
}

/// Inserts or replaces the 2x2 row for a study in an outcome.
inline void set_study_data(const Review& review, Outcome& outcome, const std::string& study_id, const TwoByTwoTable& t) {
    if (!review.find_study(study_id)) throw Error(ErrorCode::not_found, "unknown study '" + study_id + "'");
    validate(t);
    for (auto& row : outcome.rows) {
        if (row.study_id == study_id) {
            row.table = t;
            return;
        }
    }
    outcome.rows.push_back({study_id, t});
}

/// Checks the cross-references a loaded document must satisfy.
inline void validate(const Review& r) {
    if (r.title.empty()) throw Error(ErrorCode::validation, "review title must not be empty");
    std::vector<std::string_view> ids;
    for (const auto& s : r.studies) {
        validate(s);
        if (std::find(ids.begin(), ids.end(), s.id) != ids.end()) {
            throw Error(ErrorCode::validation, "duplicate study id '" + s.id + "'");
        }
        ids.push_back(s.id);
    }
    for (const auto& ref : r.included_refs) {
        if (ref.title.empty()) throw Error(ErrorCode::validation, "reference with empty title");
    }
    for (const auto& ref : r.pending_refs) {
        if (ref.title.empty()) throw Error(ErrorCode::validation, "reference with empty title");
    }
    for (const auto& c : r.comparisons) {
        for (const auto& o : c.outcomes) {
            validate(o.settings);
            std::vector<std::string_view> seen;
            for (const auto& row : o.rows) {
                if (!r.find_study(row.study_id)) {
                    throw Error(ErrorCode::validation, "outcome '" + o.name + "' references unknown study '" + row.study_id + "'");
                }
                if (std::find(seen.begin(), seen.end(), row.study_id) != seen.end()) {
                    throw Error(ErrorCode::validation, "outcome '" + o.name + "' has two rows for study '" + row.study_id + "'");
                }
                seen.push_back(row.study_id);
                validate(row.table);
            }
        }
    }
    std::vector<int> orders;
    for (const auto& d : r.rob_domains) {
        if (!d.active) continue;
        if (std::find(orders.begin(), orders.end(), d.order) != orders.end()) {
            throw Error(ErrorCode::validation, "active risk-of-bias domains share order " + std::to_string(d.order));
        }
        orders.push_back(d.order);
    }
    if (r.flow) build_flow(*r.flow);
}

// Lower-case, alphanumeric runs joined by '-'; used for figure file names.
inline std::string slugify(std::string_view title) {
    std::string out;
    bool pending_dash = false;
    for (unsigned char ch : title) {
        if (std::isalnum(ch)) {
            if (pending_dash && !out.empty()) out.push_back('-');
            pending_dash = false;
            out.push_back(static_cast<char>(std::tolower(ch)));
        } else {
            pending_dash = true;
        }
    }
    return out.empty() ? std::string("review") : out;
}

} // namespace metakit
