#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "metakit/metakit.hpp"

namespace metakit::test {

inline std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(METAKIT_TEST_DATA_DIR) / name;
}

inline std::filesystem::path golden_path(const std::string& name) {
    return std::filesystem::path(METAKIT_GOLDEN_DIR) / name;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << text;
}

// Successful placements, maxilla (group 1) vs mandible (group 2).
inline TwoByTwoTable wu_2009() { return {243, 268, 118, 135}; }
inline TwoByTwoTable miyawaki_2003() { return {53, 63, 51, 61}; }

inline std::vector<StudyTable> two_study_tables() {
    return {{"Wu 2009", wu_2009()}, {"Miyawaki 2003", miyawaki_2003()}};
}

inline StudyEstimate point(std::string id, double y, double se, Measure m = Measure::odds_ratio) {
    return {std::move(id), make_estimate(m, y, se, 0.95)};
}

// Nine log-scale points symmetric about 0.
inline std::vector<StudyEstimate> symmetric_template() {
    return {point("s0", 0.0, 0.1),   point("s1", 0.15, 0.15), point("s2", -0.15, 0.15),
            point("s3", 0.3, 0.2),   point("s4", -0.3, 0.2),  point("s5", 0.5, 0.3),
            point("s6", -0.5, 0.3),  point("s7", 0.8, 0.4),   point("s8", -0.8, 0.4)};
}

// The template with its two most negative small studies removed.
inline std::vector<StudyEstimate> deletion_fixture() {
    std::vector<StudyEstimate> out;
    for (auto& s : symmetric_template()) {
        if (s.study_id != "s6" && s.study_id != "s8") out.push_back(s);
    }
    return out;
}

inline FlowDiagram prisma_worked() {
    FlowDiagram f;
    f.identified_db = 110;
    f.identified_other = 10;
    f.after_dedup = 100;
    f.screened = 100;
    f.excluded_screening = 80;
    f.fulltext_assessed = 20;
    f.fulltext_excluded = {{"No maxilla/mandible comparison", 2}, {"Duplicate cohort", 1}};
    f.qualitative_included = 17;
    f.quantitative_included = 11;
    return f;
}

inline const std::vector<std::string>& rob_study_ids() {
    static const std::vector<std::string> ids = {
        "Antoszewska 2009", "Chen 2006",   "Chen 2007",    "Kuroda 2007",     "Manni 2011",     "Miyawaki 2003",
        "Motoyoshi 2006",   "Park 2006",   "Topouzelis 2012", "Viwattanatipa 2009", "Watanabe 2013", "Wu 2009"};
    return ids;
}

// Twelve studies judged on the six nos6 items: three items low everywhere,
// case representativeness low in 8, control definition low in 6, non-response
// rate high in all but Antoszewska 2009 (unclear).
inline Review rob_pattern_review() {
    Review r = new_review("Miniscrew stability: maxilla vs mandible");
    for (const auto& id : rob_study_ids()) add_study(r, id, DataSource::published, std::stoi(id.substr(id.size() - 4)));
    use_scheme(r, DomainScheme::nos6);
    const auto& ids = rob_study_ids();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        set_judgment(r, ids[i], "case_definition", JudgmentLevel::low);
        set_judgment(r, ids[i], "exposure_ascertainment", JudgmentLevel::low);
        set_judgment(r, ids[i], "same_ascertainment", JudgmentLevel::low);
        set_judgment(r, ids[i], "case_representativeness", i < 8 ? JudgmentLevel::low : JudgmentLevel::high);
        set_judgment(r, ids[i], "control_definition", i % 2 == 0 ? JudgmentLevel::low : JudgmentLevel::high);
        if (ids[i] == "Antoszewska 2009") {
            set_judgment(r, ids[i], "non_response_rate", JudgmentLevel::unclear, "Not reported");
        } else {
            set_judgment(r, ids[i], "non_response_rate", JudgmentLevel::high);
        }
    }
    return r;
}

inline TwoByTwoTable random_table(std::mt19937_64& rng, std::int64_t min_n = 1, std::int64_t max_n = 400) {
    std::uniform_int_distribution<std::int64_t> nd(min_n, max_n);
    const auto n1 = nd(rng);
    const auto n2 = nd(rng);
    const auto e1 = std::uniform_int_distribution<std::int64_t>(0, n1)(rng);
    const auto e2 = std::uniform_int_distribution<std::int64_t>(0, n2)(rng);
    return {e1, n1, e2, n2};
}

// All four cells at least `min_cell`.
inline TwoByTwoTable random_full_table(std::mt19937_64& rng, std::int64_t min_cell = 1, std::int64_t max_cell = 200) {
    std::uniform_int_distribution<std::int64_t> cd(min_cell, max_cell);
    const auto a = cd(rng), b = cd(rng), c = cd(rng), d = cd(rng);
    return {a, a + b, c, c + d};
}

inline std::vector<StudyTable> random_tables(std::mt19937_64& rng, int k, bool full = true) {
    std::vector<StudyTable> out;
    for (int i = 0; i < k; ++i) {
        out.push_back({"Study " + std::to_string(i + 1), full ? random_full_table(rng) : random_table(rng)});
    }
    return out;
}

} // namespace metakit::test
