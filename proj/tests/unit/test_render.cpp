#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <regex>

#include "support/figures.hpp"

using namespace metakit;
using Catch::Approx;

namespace {

int count_of(const std::string& svg, const std::string& needle) {
    int n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
}

struct Square {
    double side;
    double weight;
};

std::vector<Square> squares(const std::string& svg) {
    static const std::regex re(R"re(<rect class="study-square"[^>]* width="([0-9.]+)"[^>]* data-weight="([0-9.]+)")re");
    std::vector<Square> out;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), re); it != std::sregex_iterator(); ++it) {
        out.push_back({std::stod((*it)[1]), std::stod((*it)[2])});
    }
    return out;
}

} // namespace

TEST_CASE("number formatting") {
    CHECK(round_half_up(1.4003389830508475, 2) == "1.40");
    CHECK(round_half_up(0.125, 2) == "0.13");
    CHECK(round_half_up(2.675, 2) == "2.68");
    CHECK(round_half_up(-0.125, 2) == "-0.13");
    CHECK(round_half_up(-0.001, 2) == "0.00");
    CHECK(round_half_up(99.995, 2) == "100.00");
    CHECK(round_half_up(0.5, 0) == "1");
    CHECK(round_half_up(12.0, 2) == "12.00");
    CHECK(fixed3(1.0 / 3.0) == "0.333");
    CHECK(fixed3(-0.0001) == "0.000");
}

TEST_CASE("svg escaping") {
    CHECK(svg::escape("a<b & \"c\">") == "a&lt;b &amp; &quot;c&quot;&gt;");
}

TEST_CASE("forest plot content") {
    const auto r = test::two_study_mh();
    const auto svg = render::render_forest(r, test::miniscrew_outcome());
    CHECK(svg.starts_with("<?xml"));
    CHECK(count_of(svg, "class=\"study-square\"") == 2);
    CHECK(count_of(svg, "class=\"diamond\"") == 1);
    CHECK(svg.find("1.40 [0.73, 2.69]") != std::string::npos);
    CHECK(svg.find(render::estimate_text(r.pooled)) != std::string::npos);
    CHECK(svg.find("Chi²=0.25, df=1, p=0.61, I²=0%") != std::string::npos);
    CHECK(svg.find("Maxilla") != std::string::npos);
    CHECK(svg.find("Favours maxilla") != std::string::npos);
    CHECK(svg.find("243/268") != std::string::npos);
    CHECK(svg.find("296/331") != std::string::npos);
    CHECK(svg.find("169/196") != std::string::npos);

    for (const auto& s : r.per_study) CHECK(svg.find(fixed2(s.weight_pct) + "%") != std::string::npos);
}

TEST_CASE("forest square areas follow the weights") {
    for (const auto& r : {test::two_study_mh(), test::mixed_random()}) {
        const auto sq = squares(render::render_forest(r));
        REQUIRE(sq.size() >= 2);
        double ref = 0;
        for (const auto& s : sq) ref = std::max(ref, s.side * s.side / s.weight);
        for (const auto& s : sq) CHECK(std::fabs(s.side * s.side / s.weight / ref - 1.0) < 0.005);
    }
}

TEST_CASE("single study forest") {
    const auto r = analyze(std::vector<StudyTable>{{"Wu 2009", test::wu_2009()}}, AnalysisSettings{});
    const auto L = render::layout_forest(r);
    REQUIRE(L.rows.size() == 1);
    REQUIRE(L.rows[0].square);
    REQUIRE(L.diamond);
    CHECK(L.rows[0].square->cx == Approx(L.diamond->center).epsilon(1e-12));
    CHECK(L.rows[0].weight == "100.00%");
}

TEST_CASE("clipped and non-estimable rows") {
    const auto r = test::mixed_random();
    const auto L = render::layout_forest(r);
    REQUIRE(L.rows.size() == 4);
    CHECK(L.rows[2].whisker->clipped_high);
    CHECK(L.rows[3].estimate == "Not estimable");
    CHECK_FALSE(L.rows[3].square);
    const auto svg = render::render_forest(r);
    CHECK(count_of(svg, "class=\"clip-arrow\"") >= 1);
    CHECK(svg.find("Tau²=") != std::string::npos);

    const auto none = analyze(std::vector<StudyTable>{{"Zero 2012", {0, 15, 0, 14}}}, AnalysisSettings{});
    const auto nsvg = render::render_forest(none);
    CHECK(count_of(nsvg, "class=\"diamond\"") == 0);
    CHECK(count_of(nsvg, "Not estimable") >= 2);
}

TEST_CASE("axis scales") {
    CHECK(render::axis_scale_for(Measure::odds_ratio) == render::AxisScale::log);
    CHECK(render::axis_scale_for(Measure::risk_difference) == render::AxisScale::linear);
    AnalysisSettings rd;
    rd.measure = Measure::risk_difference;
    const auto L = render::layout_forest(analyze(test::two_study_tables(), rd));
    CHECK(L.axis.scale == render::AxisScale::linear);
    CHECK(L.axis.min == -0.25);
    CHECK(L.axis.null_x() == Approx((L.axis.left + L.axis.right) / 2));
}

TEST_CASE("funnel symmetry and markers") {
    const auto f = test::symmetric_funnel();
    const auto L = render::layout_funnel(f);
    REQUIRE(L.markers.size() == 9);
    // Pairs sit at index 2i+1 / 2i+2 in the template.
    for (std::size_t i = 1; i + 1 < L.markers.size(); i += 2) {
        CHECK(std::fabs((L.markers[i].x - L.center_x) + (L.markers[i + 1].x - L.center_x)) < 1e-9);
        CHECK(L.markers[i].y == L.markers[i + 1].y);
    }
    CHECK(std::fabs((L.base_low.x - L.center_x) + (L.base_high.x - L.center_x)) < 1e-9);
    CHECK(L.apex.x == Approx(L.center_x).epsilon(1e-12));

    const auto tf = test::trim_fill_funnel();
    const auto svg = render::render_funnel(tf);
    CHECK(count_of(svg, "class=\"funnel-point\"") == 7);
    CHECK(count_of(svg, "class=\"funnel-imputed\"") == 2);
    CHECK(count_of(svg, "class=\"pseudo-ci\"") == 2);

    const auto one = funnel_data(analyze(std::vector<StudyTable>{{"Wu 2009", test::wu_2009()}}, AnalysisSettings{}));
    const auto L1 = render::layout_funnel(one);
    CHECK(L1.markers[0].x == Approx(L1.center_x).epsilon(1e-12));
}

TEST_CASE("prisma diagram") {
    const auto svg = render::render_prisma(test::prisma_worked());
    CHECK(svg.find("(n = 17)") != std::string::npos);
    CHECK(svg.find("(n = 11)") != std::string::npos);
    CHECK(svg.find("(n = 110)") != std::string::npos);
    CHECK(svg.find("Duplicate cohort") != std::string::npos);
    CHECK(count_of(svg, "class=\"flow-arrow\"") >= 6);
    CHECK(count_of(svg, "class=\"phase-label\"") == 4);
}

TEST_CASE("risk-of-bias summary") {
    const auto svg = render::render_rob(summary_matrix(test::rob_pattern_review()));
    CHECK(count_of(svg, "class=\"rob-cell ") == 72);
    CHECK(count_of(svg, "class=\"rob-cell rob-unclear\"") == 1);
    CHECK(count_of(svg, "class=\"rob-cell rob-high\"") == 11 + 4 + 6);
    CHECK(count_of(svg, "fill=\"#3a9d46\"") == 72 - 22);
    CHECK(svg.find("Is the case definition adequate?") != std::string::npos);

    Review empty = new_review("Empty");
    use_scheme(empty, DomainScheme::nos6);
    const auto header_only = render::render_rob(summary_matrix(empty));
    CHECK(count_of(header_only, "rob-cell") == 0);
    CHECK(count_of(header_only, "class=\"domain-label\"") == 6);
}

TEST_CASE("figures are deterministic and match the goldens") {
    const auto first = test::golden_figures();
    const auto second = test::golden_figures();
    CHECK(first == second);
    const bool update = std::getenv("UPDATE_GOLDENS") != nullptr;
    for (const auto& [name, text] : first) {
        INFO(name);
        const auto path = test::golden_path(name);
        if (update) test::write_file(path, text);
        REQUIRE(std::filesystem::exists(path));
        CHECK(test::read_file(path) == text);
    }
}

TEST_CASE("figure file names") {
    CHECK(render::figure_filename(new_review("Miniscrew stability: maxilla vs mandible"), "forest") ==
          "miniscrew-stability-maxilla-vs-mandible__forest.svg");
}
