#pragma once

// PubMed MEDLINE text export.
//
// A record is a run of non-blank lines. Each field starts with a tag line
//
//   TAG - value        (tag: 1-4 of [A-Z0-9], dash-padded to column 5)
//
// and may continue on lines that begin with six spaces. Records are
// separated by blank lines. LF and CRLF are both accepted and a leading
// UTF-8 BOM is ignored.

#include <cctype>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metakit/review.hpp"

namespace metakit::medline {

struct Field {
    std::string tag;
    std::string value;

    bool operator==(const Field&) const = default;
};

struct Record {
    std::vector<Field> fields; // file order
    std::string raw;           // the record's source lines, LF-joined
    std::size_t first_line = 0;

    std::optional<std::string> first(std::string_view tag) const {
        for (const auto& f : fields) {
            if (f.tag == tag) return f.value;
        }
        return std::nullopt;
    }

    std::vector<std::string> all(std::string_view tag) const {
        std::vector<std::string> out;
        for (const auto& f : fields) {
            if (f.tag == tag) out.push_back(f.value);
        }
        return out;
    }
};

struct Warning {
    std::size_t line = 0; // 1-based; 0 when not tied to a line
    std::string message;
};

struct ParseOutput {
    std::vector<Record> records;
    std::vector<Warning> warnings;
};

namespace detail {

inline bool is_blank(std::string_view line) {
    for (char c : line) {
        if (c != ' ' && c != '\t') return false;
    }
    return true;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

// Splits "TAG - value". Returns nullopt when the line is not a tag line.
inline std::optional<Field> split_tag_line(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && i < 4) {
        const auto ch = static_cast<unsigned char>(line[i]);
        if (!(std::isupper(ch) || std::isdigit(ch))) break;
        ++i;
    }
    if (i == 0) return std::nullopt;
    const std::size_t tag_end = i;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i >= line.size() || line[i] != '-') return std::nullopt;
    ++i;
    if (i < line.size() && line[i] != ' ') return std::nullopt;
    return Field{std::string(line.substr(0, tag_end)), std::string(trim(line.substr(i)))};
}

inline bool is_continuation(std::string_view line) {
    return line.size() >= 6 && line.substr(0, 6) == "      ";
}

} // namespace detail

/// Splits a MEDLINE export into records. Never throws on content: every
/// skipped line or block is reported in `warnings` with its line number.
inline ParseOutput parse(std::string_view text) {
    ParseOutput out;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    Record current;
    bool in_block = false;
    std::size_t block_start = 0;

    auto flush = [&] {
        if (!in_block) return;
        if (current.fields.empty()) {
            out.warnings.push_back({block_start, "block has no tag line; skipped"});
        } else {
            out.records.push_back(std::move(current));
        }
        current = Record{};
        in_block = false;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const bool last = nl == std::string_view::npos;
        std::string_view line = text.substr(pos, last ? std::string_view::npos : nl - pos);
        pos = last ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (last && line.empty()) break;

        if (detail::is_blank(line)) {
            flush();
            continue;
        }
        if (!in_block) {
            in_block = true;
            block_start = line_no;
            current.first_line = line_no;
        }
        if (!current.raw.empty()) current.raw.push_back('\n');
        current.raw.append(line);

        if (detail::is_continuation(line)) {
            if (current.fields.empty()) {
                out.warnings.push_back({line_no, "continuation line without a preceding tag; skipped"});
                continue;
            }
            auto piece = detail::trim(line);
            auto& value = current.fields.back().value;
            if (!value.empty()) value.push_back(' ');
            value.append(piece);
            continue;
        }
        if (auto field = detail::split_tag_line(line)) {
            current.fields.push_back(std::move(*field));
        } else {
            out.warnings.push_back({line_no, "unrecognised line; skipped"});
        }
    }
    flush();
    return out;
}

/// Writes records back in MEDLINE layout, one line per field.
inline std::string serialize(const std::vector<Record>& records) {
    std::string out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i > 0) out.push_back('\n');
        for (const auto& f : records[i].fields) {
            std::string tag = f.tag;
            tag.resize(4, ' ');
            out += tag + "- " + f.value + "\n";
        }
    }
    return out;
}

namespace detail {

inline std::optional<int> first_year(std::string_view dp) {
    std::size_t i = 0;
    while (i < dp.size()) {
        if (!std::isdigit(static_cast<unsigned char>(dp[i]))) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < dp.size() && std::isdigit(static_cast<unsigned char>(dp[j]))) ++j;
        if (j - i == 4) return std::stoi(std::string(dp.substr(i, 4)));
        i = j;
    }
    return std::nullopt;
}

} // namespace detail

/// Maps the bibliographic tags onto a Reference. Records without TI/BTI are
/// skipped with a warning.
inline std::optional<Reference> to_reference(const Record& rec, std::vector<Warning>* warnings = nullptr) {
    auto title = rec.first("TI");
    if (!title || title->empty()) title = rec.first("BTI");
    if (!title || title->empty()) {
        if (warnings) warnings->push_back({rec.first_line, "record has no title (TI/BTI); skipped"});
        return std::nullopt;
    }
    Reference ref;
    ref.title = *title;
    ref.authors = rec.all("AU");
    if (ref.authors.empty()) ref.authors = rec.all("FAU");
    ref.journal = rec.first("TA").value_or(rec.first("JT").value_or(""));
    if (auto dp = rec.first("DP")) ref.year = detail::first_year(*dp);
    ref.volume = rec.first("VI");
    ref.pages = rec.first("PG");
    if (auto pmid = rec.first("PMID"); pmid && !pmid->empty()) ref.identifiers["PMID"] = *pmid;
    for (const auto& aid : rec.all("AID")) {
        constexpr std::string_view suffix = "[doi]";
        if (aid.size() > suffix.size() && aid.ends_with(suffix)) {
            ref.identifiers["DOI"] = std::string(detail::trim(std::string_view(aid).substr(0, aid.size() - suffix.size())));
            break;
        }
    }
    return ref;
}

inline std::vector<Reference> to_references(const std::vector<Record>& records, std::vector<Warning>* warnings = nullptr) {
    std::vector<Reference> out;
    for (const auto& r : records) {
        if (auto ref = to_reference(r, warnings)) out.push_back(std::move(*ref));
    }
    return out;
}

/// Appends references to the review's classification-pending list. A
/// reference whose PMID is already present in the review (or earlier in the
/// batch) is skipped with a warning. Returns the number added.
inline std::size_t import_pending(Review& review, const std::vector<Reference>& refs,
                                  std::vector<Warning>* warnings = nullptr) {
    auto known = [&review](const std::string& pmid) {
        for (const auto* list : {&review.included_refs, &review.pending_refs}) {
            for (const auto& r : *list) {
                if (r.pmid() == pmid) return true;
            }
        }
        return false;
    };
    std::size_t added = 0;
    for (const auto& ref : refs) {
        if (auto pmid = ref.pmid(); pmid && known(*pmid)) {
            if (warnings) warnings->push_back({0, "PMID " + *pmid + " already in review; skipped"});
            continue;
        }
        review.pending_refs.push_back(ref);
        ++added;
    }
    return added;
}

} // namespace metakit::medline
