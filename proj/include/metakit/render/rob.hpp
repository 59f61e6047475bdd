#pragma once

// Risk-of-bias summary: studies as rows, active domains as columns, one
// coloured judgment glyph per stored judgment.

#include <algorithm>
#include <string>

#include "metakit/render/figure.hpp"
#include "metakit/render/svg.hpp"
#include "metakit/risk_of_bias.hpp"

namespace metakit::render {

inline std::string_view glyph(JudgmentLevel l) {
    switch (l) {
    case JudgmentLevel::low: return "+";
    case JudgmentLevel::unclear: return "?";
    case JudgmentLevel::high: return "−";
    }
    return "";
}

inline std::string render_rob(const RobMatrix& m, const FigureSpec& spec = {}) {
    constexpr double cell = 28.0;
    constexpr double label_band = 190.0;
    std::size_t longest_id = 0;
    for (const auto& id : m.study_ids) longest_id = std::max(longest_id, id.size());
    const double id_width = std::max(120.0, static_cast<double>(longest_id) * spec.font_size * 0.6 + 10.0);
    const double grid_left = spec.margin + id_width;
    const double grid_top = spec.margin + label_band;
    const double width = spec.width > 0 ? spec.width
                                        : grid_left + cell * static_cast<double>(m.cols()) + spec.margin + 120.0;
    const double height = grid_top + cell * static_cast<double>(m.rows()) + spec.margin;
    svg::Document doc(width, height, spec.font_size);
    const auto& pal = spec.palette;

    for (std::size_t c = 0; c < m.cols(); ++c) {
        const double x = grid_left + cell * (static_cast<double>(c) + 0.5);
        doc.text({x + 4.0, grid_top - 6.0}, m.domains[c].question, svg::Anchor::start, 0, "domain-label", -60.0);
    }
    const svg::Style grid{"none", "#bbbbbb", 1.0, "", "grid"};
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double y = grid_top + cell * (static_cast<double>(r) + 0.5);
        doc.text({grid_left - 8.0, y + 4.0}, m.study_ids[r], svg::Anchor::end, 0, "study-id");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double x = grid_left + cell * static_cast<double>(c);
            doc.rect(x, y - cell / 2, cell, cell, grid);
            const auto& j = m.cells[r][c];
            if (!j) continue;
            const std::string& colour = j->level == JudgmentLevel::low       ? pal.low
                                        : j->level == JudgmentLevel::unclear ? pal.unclear
                                                                             : pal.high;
            doc.circle({x + cell / 2, y}, cell / 2 - 3.0,
                       svg::Style{colour, "none", 1.0, "", "rob-cell rob-" + std::string(to_string(j->level))});
            doc.text({x + cell / 2, y + 4.0}, glyph(j->level), svg::Anchor::middle, 0, "rob-glyph", 0, true);
        }
    }
    return doc.str();
}

} // namespace metakit::render
