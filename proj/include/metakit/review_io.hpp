#pragma once

// JSON project file for a Review.
//
// Layout (schema_version 1):
//   { "schema_version": 1, "title": ..., "created": ISO-8601, "modified": ...,
//     "studies": [...], "included_refs": [...], "pending_refs": [...],
//     "comparisons": [...], "rob_domains": [...], "flow": {...} }
//
// Unknown keys are reported as warnings and dropped. A different
// schema_version is rejected with ErrorCode::version.

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "metakit/error.hpp"
#include "metakit/review.hpp"

namespace metakit {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

namespace io_detail {

inline Json to_json(const Reference& r) {
    Json j;
    j["authors"] = r.authors;
    j["title"] = r.title;
    j["journal"] = r.journal;
    if (r.year) j["year"] = *r.year;
    if (r.volume) j["volume"] = *r.volume;
    if (r.pages) j["pages"] = *r.pages;
    j["identifiers"] = Json::object();
    for (const auto& [k, v] : r.identifiers) j["identifiers"][k] = v;
    return j;
}

inline Json to_json(const AnalysisSettings& s) {
    return Json{{"method", to_string(s.method)},
                {"model", to_string(s.model)},
                {"measure", to_string(s.measure)},
                {"ci_level", s.ci_level},
                {"totals", to_string(s.totals)}};
}

inline Json to_json(const FlowDiagram& f) {
    Json reasons = Json::array();
    for (const auto& r : f.fulltext_excluded) reasons.push_back({{"reason", r.reason}, {"n", r.n}});
    return Json{{"identified_db", f.identified_db},
                {"identified_other", f.identified_other},
                {"after_dedup", f.after_dedup},
                {"screened", f.screened},
                {"excluded_screening", f.excluded_screening},
                {"fulltext_assessed", f.fulltext_assessed},
                {"fulltext_excluded", reasons},
                {"qualitative_included", f.qualitative_included},
                {"quantitative_included", f.quantitative_included}};
}

// Typed field access with a JSON-path-like location for error messages.
class Reader {
public:
    explicit Reader(std::vector<std::string>& warnings) : warnings_(warnings) {}

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        throw Error(ErrorCode::parse, "field '" + path + "': " + what);
    }

    const Json& require(const Json& obj, std::string_view key, const std::string& path) const {
        auto it = obj.find(std::string(key));
        if (it == obj.end()) fail(join(path, key), "missing");
        return *it;
    }

    const Json& object(const Json& j, const std::string& path) const {
        if (!j.is_object()) fail(path, "expected object");
        return j;
    }

    const Json& array(const Json& j, const std::string& path) const {
        if (!j.is_array()) fail(path, "expected array");
        return j;
    }

    std::string str(const Json& obj, std::string_view key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_string()) fail(join(path, key), "expected string");
        return v.get<std::string>();
    }

    std::optional<std::string> opt_str(const Json& obj, std::string_view key, const std::string& path) const {
        if (!obj.contains(std::string(key))) return std::nullopt;
        return str(obj, key, path);
    }

    std::int64_t integer(const Json& obj, std::string_view key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_number_integer()) fail(join(path, key), "expected integer");
        return v.get<std::int64_t>();
    }

    double number(const Json& obj, std::string_view key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_number()) fail(join(path, key), "expected number");
        return v.get<double>();
    }

    bool boolean(const Json& obj, std::string_view key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_boolean()) fail(join(path, key), "expected boolean");
        return v.get<bool>();
    }

    template <typename Parse>
    auto enumeration(const Json& obj, std::string_view key, const std::string& path, Parse parse) const {
        const auto s = str(obj, key, path);
        auto v = parse(s);
        if (!v) fail(join(path, key), "unrecognised value '" + s + "'");
        return *v;
    }

    std::pair<std::string, std::string> string_pair(const Json& obj, std::string_view key, const std::string& path) const {
        const auto& v = require(obj, key, path);
        if (!v.is_array() || v.size() != 2 || !v[0].is_string() || !v[1].is_string()) {
            fail(join(path, key), "expected [string, string]");
        }
        return {v[0].get<std::string>(), v[1].get<std::string>()};
    }

    void check_keys(const Json& obj, std::initializer_list<std::string_view> known, const std::string& path) const {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool ok = false;
            for (auto k : known) ok = ok || it.key() == k;
            if (!ok) warnings_.push_back("ignoring unknown field '" + join(path, it.key()) + "'");
        }
    }

    static std::string join(const std::string& path, std::string_view key) {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }
    static std::string index(const std::string& path, std::size_t i) {
        return path + "[" + std::to_string(i) + "]";
    }

private:
    std::vector<std::string>& warnings_;
};

inline Reference read_reference(const Reader& rd, const Json& j, const std::string& path) {
    rd.object(j, path);
    rd.check_keys(j, {"authors", "title", "journal", "year", "volume", "pages", "identifiers"}, path);
    Reference r;
    const auto& authors = rd.array(rd.require(j, "authors", path), Reader::join(path, "authors"));
    for (std::size_t i = 0; i < authors.size(); ++i) {
        if (!authors[i].is_string()) rd.fail(Reader::index(Reader::join(path, "authors"), i), "expected string");
        r.authors.push_back(authors[i].get<std::string>());
    }
    r.title = rd.str(j, "title", path);
    r.journal = rd.str(j, "journal", path);
    if (j.contains("year")) r.year = static_cast<int>(rd.integer(j, "year", path));
    r.volume = rd.opt_str(j, "volume", path);
    r.pages = rd.opt_str(j, "pages", path);
    const auto idpath = Reader::join(path, "identifiers");
    const auto& ids = rd.object(rd.require(j, "identifiers", path), idpath);
    for (auto it = ids.begin(); it != ids.end(); ++it) {
        if (!it->is_string()) rd.fail(Reader::join(idpath, it.key()), "expected string");
        r.identifiers[it.key()] = it->get<std::string>();
    }
    return r;
}

inline AnalysisSettings read_settings(const Reader& rd, const Json& j, const std::string& path) {
    rd.object(j, path);
    rd.check_keys(j, {"method", "model", "measure", "ci_level", "totals"}, path);
    AnalysisSettings s;
    s.method = rd.enumeration(j, "method", path, parse_method);
    s.model = rd.enumeration(j, "model", path, parse_model);
    s.measure = rd.enumeration(j, "measure", path, parse_measure);
    s.ci_level = rd.number(j, "ci_level", path);
    s.totals = rd.enumeration(j, "totals", path, parse_totals);
    return s;
}

inline FlowDiagram read_flow(const Reader& rd, const Json& j, const std::string& path) {
    rd.object(j, path);
    rd.check_keys(j, {"identified_db", "identified_other", "after_dedup", "screened", "excluded_screening",
                      "fulltext_assessed", "fulltext_excluded", "qualitative_included", "quantitative_included"},
                  path);
    FlowDiagram f;
    f.identified_db = rd.integer(j, "identified_db", path);
    f.identified_other = rd.integer(j, "identified_other", path);
    f.after_dedup = rd.integer(j, "after_dedup", path);
    f.screened = rd.integer(j, "screened", path);
    f.excluded_screening = rd.integer(j, "excluded_screening", path);
    f.fulltext_assessed = rd.integer(j, "fulltext_assessed", path);
    const auto rpath = Reader::join(path, "fulltext_excluded");
    const auto& reasons = rd.array(rd.require(j, "fulltext_excluded", path), rpath);
    for (std::size_t i = 0; i < reasons.size(); ++i) {
        const auto p = Reader::index(rpath, i);
        rd.object(reasons[i], p);
        rd.check_keys(reasons[i], {"reason", "n"}, p);
        f.fulltext_excluded.push_back({rd.str(reasons[i], "reason", p), rd.integer(reasons[i], "n", p)});
    }
    f.qualitative_included = rd.integer(j, "qualitative_included", path);
    f.quantitative_included = rd.integer(j, "quantitative_included", path);
    return f;
}

inline std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace io_detail

inline Json to_json(const Review& r) {
    using namespace io_detail;
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["title"] = r.title;
    j["created"] = format_timestamp(r.created);
    j["modified"] = format_timestamp(r.modified);

    j["studies"] = Json::array();
    for (const auto& s : r.studies) {
        Json js;
        js["id"] = s.id;
        js["data_source"] = to_string(s.data_source);
        js["year"] = s.year;
        js["characteristics"] = {{"methods", s.characteristics.methods},
                                 {"participants", s.characteristics.participants},
                                 {"interventions", s.characteristics.interventions},
                                 {"outcomes", s.characteristics.outcomes},
                                 {"notes", s.characteristics.notes}};
        js["rob_judgments"] = Json::array();
        for (const auto& [domain, jd] : s.rob_judgments) {
            js["rob_judgments"].push_back({{"domain", domain}, {"level", to_string(jd.level)}, {"support", jd.support}});
        }
        j["studies"].push_back(std::move(js));
    }

    j["included_refs"] = Json::array();
    for (const auto& ref : r.included_refs) j["included_refs"].push_back(io_detail::to_json(ref));
    j["pending_refs"] = Json::array();
    for (const auto& ref : r.pending_refs) j["pending_refs"].push_back(io_detail::to_json(ref));

    j["comparisons"] = Json::array();
    for (const auto& c : r.comparisons) {
        Json jc;
        jc["name"] = c.name;
        jc["outcomes"] = Json::array();
        for (const auto& o : c.outcomes) {
            Json jo;
            jo["name"] = o.name;
            jo["data_type"] = "dichotomous";
            jo["group_labels"] = {o.group_labels.first, o.group_labels.second};
            jo["graph_labels"] = {o.graph_labels.first, o.graph_labels.second};
            jo["settings"] = io_detail::to_json(o.settings);
            jo["rows"] = Json::array();
            for (const auto& row : o.rows) {
                jo["rows"].push_back({{"study", row.study_id},
                                      {"events1", row.table.events1},
                                      {"total1", row.table.total1},
                                      {"events2", row.table.events2},
                                      {"total2", row.table.total2}});
            }
            jc["outcomes"].push_back(std::move(jo));
        }
        j["comparisons"].push_back(std::move(jc));
    }

    j["rob_domains"] = Json::array();
    for (const auto& d : r.rob_domains) {
        j["rob_domains"].push_back({{"id", d.id}, {"question", d.question}, {"active", d.active}, {"order", d.order}});
    }
    if (r.flow) j["flow"] = io_detail::to_json(*r.flow);
    return j;
}

inline std::string to_json_text(const Review& r) { return to_json(r).dump(2) + "\n"; }

struct LoadResult {
    Review review;
    std::vector<std::string> warnings;
};

inline LoadResult from_json(const Json& j) {
    using io_detail::Reader;
    LoadResult out;
    Reader rd(out.warnings);
    rd.object(j, "<root>");

    const auto& version = rd.require(j, "schema_version", "");
    if (!version.is_number_integer()) rd.fail("schema_version", "expected integer");
    if (version.get<std::int64_t>() != kSchemaVersion) {
        throw Error(ErrorCode::version, "unsupported schema_version " + version.dump() + " (this build reads version " +
                                            std::to_string(kSchemaVersion) + ")");
    }
    rd.check_keys(j, {"schema_version", "title", "created", "modified", "studies", "included_refs", "pending_refs",
                      "comparisons", "rob_domains", "flow"},
                  "");

    Review& r = out.review;
    r.title = rd.str(j, "title", "");
    for (auto key : {"created", "modified"}) {
        auto t = parse_timestamp(rd.str(j, key, ""));
        if (!t) rd.fail(key, "expected ISO-8601 UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)");
        (std::string_view(key) == "created" ? r.created : r.modified) = *t;
    }

    const auto& studies = rd.array(rd.require(j, "studies", ""), "studies");
    for (std::size_t i = 0; i < studies.size(); ++i) {
        const auto p = Reader::index("studies", i);
        const auto& js = rd.object(studies[i], p);
        rd.check_keys(js, {"id", "data_source", "year", "characteristics", "rob_judgments"}, p);
        Study s;
        s.id = rd.str(js, "id", p);
        s.data_source = rd.enumeration(js, "data_source", p, parse_data_source);
        s.year = static_cast<int>(rd.integer(js, "year", p));
        const auto cp = Reader::join(p, "characteristics");
        const auto& jc = rd.object(rd.require(js, "characteristics", p), cp);
        rd.check_keys(jc, {"methods", "participants", "interventions", "outcomes", "notes"}, cp);
        s.characteristics = {rd.str(jc, "methods", cp), rd.str(jc, "participants", cp),
                             rd.str(jc, "interventions", cp), rd.str(jc, "outcomes", cp), rd.str(jc, "notes", cp)};
        const auto jp = Reader::join(p, "rob_judgments");
        const auto& judgments = rd.array(rd.require(js, "rob_judgments", p), jp);
        for (std::size_t k = 0; k < judgments.size(); ++k) {
            const auto q = Reader::index(jp, k);
            rd.object(judgments[k], q);
            rd.check_keys(judgments[k], {"domain", "level", "support"}, q);
            s.rob_judgments[rd.str(judgments[k], "domain", q)] =
                Judgment{rd.enumeration(judgments[k], "level", q, parse_judgment_level), rd.str(judgments[k], "support", q)};
        }
        r.studies.push_back(std::move(s));
    }

    for (auto key : {"included_refs", "pending_refs"}) {
        const auto& refs = rd.array(rd.require(j, key, ""), key);
        auto& dest = std::string_view(key) == "included_refs" ? r.included_refs : r.pending_refs;
        for (std::size_t i = 0; i < refs.size(); ++i) {
            dest.push_back(io_detail::read_reference(rd, refs[i], Reader::index(key, i)));
        }
    }

    const auto& comps = rd.array(rd.require(j, "comparisons", ""), "comparisons");
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto p = Reader::index("comparisons", i);
        const auto& jc = rd.object(comps[i], p);
        rd.check_keys(jc, {"name", "outcomes"}, p);
        Comparison c;
        c.name = rd.str(jc, "name", p);
        const auto op = Reader::join(p, "outcomes");
        const auto& outcomes = rd.array(rd.require(jc, "outcomes", p), op);
        for (std::size_t k = 0; k < outcomes.size(); ++k) {
            const auto q = Reader::index(op, k);
            const auto& jo = rd.object(outcomes[k], q);
            rd.check_keys(jo, {"name", "data_type", "group_labels", "graph_labels", "settings", "rows"}, q);
            Outcome o;
            o.name = rd.str(jo, "name", q);
            if (rd.str(jo, "data_type", q) != "dichotomous") {
                rd.fail(Reader::join(q, "data_type"), "only 'dichotomous' outcomes are supported");
            }
            o.group_labels = rd.string_pair(jo, "group_labels", q);
            o.graph_labels = rd.string_pair(jo, "graph_labels", q);
            o.settings = io_detail::read_settings(rd, rd.require(jo, "settings", q), Reader::join(q, "settings"));
            const auto rp = Reader::join(q, "rows");
            const auto& rows = rd.array(rd.require(jo, "rows", q), rp);
            for (std::size_t m = 0; m < rows.size(); ++m) {
                const auto w = Reader::index(rp, m);
                rd.object(rows[m], w);
                rd.check_keys(rows[m], {"study", "events1", "total1", "events2", "total2"}, w);
                o.rows.push_back({rd.str(rows[m], "study", w),
                                  {rd.integer(rows[m], "events1", w), rd.integer(rows[m], "total1", w),
                                   rd.integer(rows[m], "events2", w), rd.integer(rows[m], "total2", w)}});
            }
            c.outcomes.push_back(std::move(o));
        }
        r.comparisons.push_back(std::move(c));
    }

    const auto& domains = rd.array(rd.require(j, "rob_domains", ""), "rob_domains");
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const auto p = Reader::index("rob_domains", i);
        rd.object(domains[i], p);
        rd.check_keys(domains[i], {"id", "question", "active", "order"}, p);
        r.rob_domains.push_back({rd.str(domains[i], "id", p), rd.str(domains[i], "question", p),
                                 rd.boolean(domains[i], "active", p),
                                 static_cast<int>(rd.integer(domains[i], "order", p))});
    }

    if (j.contains("flow")) r.flow = io_detail::read_flow(rd, j["flow"], "flow");

    validate(r);
    return out;
}

inline LoadResult from_json_text(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto [line, col] = io_detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw Error(ErrorCode::parse, "malformed project file at line " + std::to_string(line) + ", column " +
                                          std::to_string(col) + ": " + e.what());
    }
    return from_json(j);
}

/// Writes atomically: the document goes to a sibling temp file which then
/// replaces `path`.
inline void save(const Review& r, const std::filesystem::path& path) {
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot write '" + tmp.string() + "'");
        out << to_json_text(r);
        if (!out.flush()) throw Error(ErrorCode::io, "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::io, "cannot replace '" + path.string() + "': " + ec.message());
}

inline LoadResult load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open project file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return from_json_text(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

} // namespace metakit
