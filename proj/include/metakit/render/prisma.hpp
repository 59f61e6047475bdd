#pragma once

// PRISMA four-phase flow diagram.

#include <string>
#include <vector>

#include "metakit/prisma.hpp"
#include "metakit/render/figure.hpp"
#include "metakit/render/svg.hpp"

namespace metakit::render {

struct FlowBox {
    std::string id;
    double x = 0, y = 0, w = 0, h = 0;
    std::vector<std::string> lines;
};

namespace detail {

// Greedy word wrap for a fixed-width font.
inline std::vector<std::string> wrap(const std::string& text, std::size_t width) {
    std::vector<std::string> out;
    std::string line;
    std::size_t i = 0;
    while (i < text.size()) {
        auto j = text.find(' ', i);
        if (j == std::string::npos) j = text.size();
        const std::string word = text.substr(i, j - i);
        if (!line.empty() && line.size() + 1 + word.size() > width) {
            out.push_back(line);
            line.clear();
        }
        if (!line.empty()) line.push_back(' ');
        line += word;
        i = j + 1;
    }
    if (!line.empty()) out.push_back(line);
    return out;
}

inline FlowBox make_box(std::string id, double x, double y, double w, const std::vector<std::string>& paragraphs,
                        double font_size) {
    FlowBox b{std::move(id), x, y, w, 0, {}};
    const auto chars = static_cast<std::size_t>((w - 12.0) / (font_size * 0.6));
    for (const auto& p : paragraphs) {
        for (auto& l : wrap(p, chars)) b.lines.push_back(std::move(l));
    }
    b.h = 12.0 + font_size * 1.3 * static_cast<double>(b.lines.size());
    return b;
}

inline std::string n_of(std::int64_t n) { return "(n = " + std::to_string(n) + ")"; }

} // namespace detail

inline std::vector<FlowBox> layout_prisma(const FlowDiagram& f, const FigureSpec& spec = {}) {
    const double fs = spec.font_size;
    const double left = spec.margin + 40.0;
    const double bw = 250.0;
    const double gap = 40.0;
    const double col2 = left + bw + gap;
    std::vector<FlowBox> boxes;
    double y = spec.margin;

    auto db = detail::make_box("identified_db", left, y, bw,
                               {"Records identified through database searching", detail::n_of(f.identified_db)}, fs);
    auto other = detail::make_box("identified_other", col2, y, bw,
                                  {"Additional records identified through other sources", detail::n_of(f.identified_other)}, fs);
    y += std::max(db.h, other.h) + gap;
    boxes.push_back(db);
    boxes.push_back(other);

    auto dedup = detail::make_box("after_dedup", left + (bw + gap) / 2.0, y, bw,
                                  {"Records after duplicates removed", detail::n_of(f.after_dedup)}, fs);
    y += dedup.h + gap;
    boxes.push_back(dedup);

    auto screened = detail::make_box("screened", left, y, bw, {"Records screened", detail::n_of(f.screened)}, fs);
    auto excl = detail::make_box("excluded_screening", col2, y, bw, {"Records excluded", detail::n_of(f.excluded_screening)}, fs);
    y += std::max(screened.h, excl.h) + gap;
    boxes.push_back(screened);
    boxes.push_back(excl);

    std::vector<std::string> reasons = {"Full-text articles excluded, with reasons",
                                        detail::n_of(f.fulltext_excluded_total())};
    for (const auto& r : f.fulltext_excluded) reasons.push_back(r.reason + " " + detail::n_of(r.n));
    auto assessed = detail::make_box("fulltext_assessed", left, y, bw,
                                     {"Full-text articles assessed for eligibility", detail::n_of(f.fulltext_assessed)}, fs);
    auto ft_excl = detail::make_box("fulltext_excluded", col2, y, bw, reasons, fs);
    y += std::max(assessed.h, ft_excl.h) + gap;
    boxes.push_back(assessed);
    boxes.push_back(ft_excl);

    auto qual = detail::make_box("qualitative_included", left, y, bw,
                                 {"Studies included in qualitative synthesis", detail::n_of(f.qualitative_included)}, fs);
    y += qual.h + gap;
    boxes.push_back(qual);
    auto quant = detail::make_box("quantitative_included", left, y, bw,
                                  {"Studies included in quantitative synthesis (meta-analysis)",
                                   detail::n_of(f.quantitative_included)},
                                  fs);
    boxes.push_back(quant);
    return boxes;
}

inline std::string render_prisma(const FlowDiagram& f, const FigureSpec& spec = {}) {
    const auto boxes = layout_prisma(f, spec);
    const double width = spec.width > 0 ? spec.width : spec.margin * 2 + 40.0 + 250.0 * 2 + 40.0;
    double height = 0;
    for (const auto& b : boxes) height = std::max(height, b.y + b.h);
    height += spec.margin;
    svg::Document doc(width, height, spec.font_size);
    const auto& pal = spec.palette;

    auto box = [&](std::string_view id) -> const FlowBox& {
        for (const auto& b : boxes) {
            if (b.id == id) return b;
        }
        return boxes.front();
    };
    const svg::Style edge{"none", pal.ink, 1.0, "", "flow-arrow"};
    auto below = [&](const FlowBox& from, const FlowBox& to) {
        doc.arrow({from.x + from.w / 2, from.y + from.h}, {from.x + from.w / 2, to.y}, edge);
    };
    auto right_of = [&](const FlowBox& from, const FlowBox& to) {
        doc.arrow({from.x + from.w, from.y + from.h / 2}, {to.x, from.y + from.h / 2}, edge);
    };
    const auto& dedup = box("after_dedup");
    doc.arrow({box("identified_db").x + box("identified_db").w / 2, box("identified_db").y + box("identified_db").h},
              {box("identified_db").x + box("identified_db").w / 2, dedup.y}, edge);
    doc.arrow({box("identified_other").x + box("identified_other").w / 2,
               box("identified_other").y + box("identified_other").h},
              {box("identified_other").x + box("identified_other").w / 2, dedup.y}, edge);
    doc.arrow({box("screened").x + box("screened").w / 2, dedup.y + dedup.h},
              {box("screened").x + box("screened").w / 2, box("screened").y}, edge);
    right_of(box("screened"), box("excluded_screening"));
    below(box("screened"), box("fulltext_assessed"));
    right_of(box("fulltext_assessed"), box("fulltext_excluded"));
    below(box("fulltext_assessed"), box("qualitative_included"));
    below(box("qualitative_included"), box("quantitative_included"));

    const svg::Style frame{"white", pal.ink, 1.0, "", "flow-box"};
    for (const auto& b : boxes) {
        doc.rect(b.x, b.y, b.w, b.h, frame);
        double ty = b.y + 6.0 + spec.font_size;
        for (const auto& l : b.lines) {
            doc.text({b.x + b.w / 2, ty}, l, svg::Anchor::middle, 0, "flow-text");
            ty += spec.font_size * 1.3;
        }
    }

    struct Phase {
        const char* label;
        double top, bottom;
    };
    const Phase phases[] = {
        {"Identification", box("identified_db").y, box("identified_db").y + box("identified_db").h},
        {"Screening", dedup.y, box("excluded_screening").y + box("excluded_screening").h},
        {"Eligibility", box("fulltext_assessed").y, box("fulltext_excluded").y + box("fulltext_excluded").h},
        {"Included", box("qualitative_included").y, box("quantitative_included").y + box("quantitative_included").h},
    };
    for (const auto& p : phases) {
        doc.rect(spec.margin, p.top, 24.0, p.bottom - p.top, svg::Style{"#dbe7f5", pal.ink, 1.0, "", "phase"});
        doc.text({spec.margin + 16.0, (p.top + p.bottom) / 2}, p.label, svg::Anchor::middle, 0, "phase-label", -90.0, true);
    }
    return doc.str();
}

} // namespace metakit::render
