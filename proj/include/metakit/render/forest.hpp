#pragma once

// Forest plot: per-study rows with weight-scaled squares and CI whiskers, a
// pooled diamond, the null line and the heterogeneity / overall-effect text.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "metakit/format.hpp"
#include "metakit/pooling.hpp"
#include "metakit/render/figure.hpp"
#include "metakit/render/svg.hpp"
#include "metakit/review.hpp"

namespace metakit::render {

struct ForestAxis {
    AxisScale scale = AxisScale::log;
    double min = -1.0; // analysis scale
    double max = 1.0;
    double left = 0.0; // user units
    double right = 0.0;
    std::vector<double> ticks; // natural scale

    double to_analysis(double natural) const { return scale == AxisScale::log ? std::log(natural) : natural; }
    double x(double analysis_value) const { return left + (analysis_value - min) / (max - min) * (right - left); }
    double null_x() const { return x(0.0); }
};

struct ForestSquare {
    double cx = 0, cy = 0, side = 0;
};

struct ForestWhisker {
    double x1 = 0, x2 = 0, y = 0;
    bool clipped_low = false;
    bool clipped_high = false;
};

struct ForestRow {
    std::string study_id;
    std::string group1; // "e/n"
    std::string group2;
    std::string weight;   // "12.34%"
    std::string estimate; // "1.40 [0.73, 2.69]" or "Not estimable"
    double weight_pct = 0;
    double y = 0;
    std::optional<ForestSquare> square;
    std::optional<ForestWhisker> whisker;
};

struct ForestDiamond {
    double left = 0, center = 0, right = 0, y = 0, half_height = 0;
};

struct ForestLayout {
    double width = 0, height = 0;
    ForestAxis axis;
    std::vector<ForestRow> rows;
    std::optional<ForestDiamond> diamond;
    std::string total_label;
    std::string total_estimate;
    std::string total_group1, total_group2;
    std::string heterogeneity_text;
    std::string overall_text;
    std::string header_measure;
    double max_square_side = 0;
};

// Labels for the figure; defaults come from the outcome when one is given.
struct ForestLabels {
    std::string group1 = "Experimental";
    std::string group2 = "Control";
    std::string left = "Favours control";
    std::string right = "Favours experimental";
    std::string title;

    static ForestLabels from(const Outcome& o) {
        return {o.group_labels.first, o.group_labels.second, o.graph_labels.first, o.graph_labels.second, o.name};
    }
};

inline std::string estimate_text(const EffectEstimate& e) {
    if (!e.estimable) return "Not estimable";
    return fixed2(e.point) + " [" + fixed2(e.ci_low) + ", " + fixed2(e.ci_high) + "]";
}

inline std::string heterogeneity_text(const Heterogeneity& h, Model model) {
    std::string s = "Heterogeneity: ";
    if (model == Model::random) s += "Tau²=" + fixed2(h.tau_squared) + "; ";
    s += "Chi²=" + fixed2(h.q) + ", df=" + std::to_string(h.df) + ", p=" + fixed2(h.p_value) +
         ", I²=" + round_half_up(h.i_squared, 0) + "%";
    return s;
}

inline std::string overall_text(const PooledResult& r) {
    if (!r.pooled.estimable) return "Test for overall effect: Not applicable";
    return "Test for overall effect: Z=" + fixed2(std::fabs(r.z)) + ", p=" + fixed2(r.p_overall);
}

namespace detail {

inline ForestAxis choose_axis(const PooledResult& r, double left, double right) {
    ForestAxis axis;
    axis.scale = axis_scale_for(r.settings.measure);
    axis.left = left;
    axis.right = right;
    double extent = 0.0;
    auto consider = [&](const EffectEstimate& e) {
        if (!e.estimable) return;
        for (double v : {e.ci_low, e.ci_high, e.point}) {
            const double a = axis.to_analysis(v);
            if (std::isfinite(a)) extent = std::max(extent, std::fabs(a));
        }
    };
    for (const auto& s : r.per_study) consider(s.estimate);
    consider(r.pooled);

    if (axis.scale == AxisScale::log) {
        struct Option {
            double limit;
            std::vector<double> ticks;
        };
        static const std::vector<Option> options = {
            {2.0, {0.5, 0.7, 1.0, 1.5, 2.0}},
            {5.0, {0.2, 0.5, 1.0, 2.0, 5.0}},
            {10.0, {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}},
            {100.0, {0.01, 0.1, 1.0, 10.0, 100.0}},
            {1000.0, {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0}},
        };
        const Option* pick = &options.back();
        for (const auto& o : options) {
            if (std::log(o.limit) >= extent) {
                pick = &o;
                break;
            }
        }
        axis.min = -std::log(pick->limit);
        axis.max = std::log(pick->limit);
        axis.ticks = pick->ticks;
    } else {
        double limit = 1.0;
        for (double l : {0.25, 0.5, 1.0}) {
            if (l >= extent) {
                limit = l;
                break;
            }
        }
        axis.min = -limit;
        axis.max = limit;
        axis.ticks = {-limit, -limit / 2, 0.0, limit / 2, limit};
    }
    return axis;
}

inline std::string tick_label(double v) {
    // Natural-scale tick values are short decimals; drop trailing zeros.
    std::string s = round_half_up(v, 3);
    while (s.find('.') != std::string::npos && (s.back() == '0' || s.back() == '.')) {
        const bool dot = s.back() == '.';
        s.pop_back();
        if (dot) break;
    }
    return s;
}

} // namespace detail

inline constexpr double kForestRowHeight = 22.0;
inline constexpr double kForestMaxSquare = 16.0;

inline ForestLayout layout_forest(const PooledResult& r, const FigureSpec& spec = {}) {
    ForestLayout L;
    L.width = spec.width > 0 ? spec.width : 980.0;
    const double plot_left = L.width - 330.0;
    const double plot_right = L.width - spec.margin - 10.0;
    L.axis = detail::choose_axis(r, plot_left, plot_right);
    L.max_square_side = kForestMaxSquare;
    L.header_measure = std::string(abbreviation(r.settings.measure)) + " " +
                       std::string(display_name(r.settings.method)) + ", " +
                       (r.settings.model == Model::fixed ? "Fixed" : "Random") + ", " +
                       round_half_up(r.settings.ci_level * 100.0, 0) + "% CI";

    double max_w = 0.0;
    for (const auto& s : r.per_study) {
        if (s.estimate.estimable) max_w = std::max(max_w, s.weight_pct);
    }

    const double top = spec.margin + 56.0;
    double y = top;
    long long e1 = 0, n1 = 0, e2 = 0, n2 = 0;
    for (const auto& s : r.per_study) {
        ForestRow row;
        row.study_id = s.study_id;
        row.y = y;
        if (s.table) {
            row.group1 = std::to_string(s.table->events1) + "/" + std::to_string(s.table->total1);
            row.group2 = std::to_string(s.table->events2) + "/" + std::to_string(s.table->total2);
            e1 += s.table->events1;
            n1 += s.table->total1;
            e2 += s.table->events2;
            n2 += s.table->total2;
        }
        row.estimate = estimate_text(s.estimate);
        if (s.estimate.estimable) {
            row.weight_pct = s.weight_pct;
            row.weight = fixed2(s.weight_pct) + "%";
            const double cx = L.axis.x(s.estimate.analysis_value);
            const bool on_axis = s.estimate.analysis_value >= L.axis.min && s.estimate.analysis_value <= L.axis.max;
            if (max_w > 0.0 && s.weight_pct > 0.0 && on_axis) {
                const double side = kForestMaxSquare * std::sqrt(s.weight_pct / max_w);
                row.square = ForestSquare{cx, y, side};
            }
            ForestWhisker w;
            w.y = y;
            double lo = L.axis.to_analysis(s.estimate.ci_low);
            double hi = L.axis.to_analysis(s.estimate.ci_high);
            if (!(lo >= L.axis.min)) {
                lo = L.axis.min;
                w.clipped_low = true;
            }
            if (!(hi <= L.axis.max)) {
                hi = L.axis.max;
                w.clipped_high = true;
            }
            w.x1 = L.axis.x(lo);
            w.x2 = L.axis.x(hi);
            row.whisker = w;
        } else {
            row.weight = "";
        }
        L.rows.push_back(std::move(row));
        y += kForestRowHeight;
    }

    y += 6.0;
    const std::string ci_pct = round_half_up(r.settings.ci_level * 100.0, 0);
    L.total_label = "Total (" + ci_pct + "% CI)";
    if (r.settings.totals != Totals::none) {
        L.total_group1 = std::to_string(e1) + "/" + std::to_string(n1);
        L.total_group2 = std::to_string(e2) + "/" + std::to_string(n2);
    }
    L.total_estimate = estimate_text(r.pooled);
    if (r.pooled.estimable) {
        ForestDiamond d;
        auto clampx = [&](double a) { return L.axis.x(std::clamp(a, L.axis.min, L.axis.max)); };
        d.left = clampx(L.axis.to_analysis(r.pooled.ci_low));
        d.right = clampx(L.axis.to_analysis(r.pooled.ci_high));
        d.center = clampx(r.pooled.analysis_value);
        d.y = y;
        d.half_height = 7.0;
        L.diamond = d;
    }
    y += kForestRowHeight;
    L.heterogeneity_text = heterogeneity_text(r.heterogeneity, r.settings.model);
    L.overall_text = overall_text(r);
    L.height = y + 96.0;
    return L;
}

inline std::string render_forest(const ForestLayout& L, const ForestLabels& labels, const FigureSpec& spec = {}) {
    svg::Document doc(L.width, L.height, spec.font_size);
    const auto& pal = spec.palette;
    const double x_id = spec.margin;
    const double x_g1 = spec.margin + 200.0;
    const double x_g2 = x_g1 + 80.0;
    const double x_w = x_g2 + 70.0;
    const double x_est = x_w + 140.0;
    const double head_y = spec.margin + 30.0;

    if (!labels.title.empty()) doc.text({x_id, spec.margin + 8.0}, labels.title, svg::Anchor::start, 0, "title", 0, true);
    doc.text({x_id, head_y}, "Study or Subgroup", svg::Anchor::start, 0, "header", 0, true);
    doc.text({x_g1, head_y - 13.0}, labels.group1, svg::Anchor::end, 0, "header", 0, true);
    doc.text({x_g2, head_y - 13.0}, labels.group2, svg::Anchor::end, 0, "header", 0, true);
    doc.text({x_g1, head_y}, "Events/Total", svg::Anchor::end, 0, "header");
    doc.text({x_g2, head_y}, "Events/Total", svg::Anchor::end, 0, "header");
    doc.text({x_w, head_y}, "Weight", svg::Anchor::end, 0, "header", 0, true);
    doc.text({x_est, head_y}, L.header_measure, svg::Anchor::end, 0, "header", 0, true);
    doc.text({(L.axis.left + L.axis.right) / 2, head_y}, L.header_measure, svg::Anchor::middle, 0, "header", 0, true);

    const svg::Style whisker{"none", pal.ink, 1.0, "", "ci-line"};
    const svg::Style square{pal.study, "none", 1.0, "", "study-square"};
    for (const auto& row : L.rows) {
        const double ty = row.y + 4.0;
        doc.text({x_id, ty}, row.study_id, svg::Anchor::start, 0, "study-id");
        if (!row.group1.empty()) doc.text({x_g1, ty}, row.group1, svg::Anchor::end, 0, "group1");
        if (!row.group2.empty()) doc.text({x_g2, ty}, row.group2, svg::Anchor::end, 0, "group2");
        if (!row.weight.empty()) doc.text({x_w, ty}, row.weight, svg::Anchor::end, 0, "weight");
        doc.text({x_est, ty}, row.estimate, svg::Anchor::end, 0, "estimate");
        if (row.whisker) {
            const auto& w = *row.whisker;
            doc.line({w.x1, w.y}, {w.x2, w.y}, whisker);
            const svg::Style head{pal.ink, "none", 1.0, "", "clip-arrow"};
            if (w.clipped_low) doc.polygon({{w.x1, w.y}, {w.x1 + 6, w.y - 3.5}, {w.x1 + 6, w.y + 3.5}}, head);
            if (w.clipped_high) doc.polygon({{w.x2, w.y}, {w.x2 - 6, w.y - 3.5}, {w.x2 - 6, w.y + 3.5}}, head);
        }
        if (row.square) {
            const auto& s = *row.square;
            const std::string extra = " data-weight=\"" + fixed2(row.weight_pct) + "\"";
            doc.rect(s.cx - s.side / 2, s.cy - s.side / 2, s.side, s.side, square, extra);
        }
    }

    const double total_y = L.diamond ? L.diamond->y
                                     : (L.rows.empty() ? spec.margin + 62.0 : L.rows.back().y + kForestRowHeight + 6.0);
    doc.text({x_id, total_y + 4.0}, L.total_label, svg::Anchor::start, 0, "total-label", 0, true);
    if (!L.total_group1.empty()) doc.text({x_g1, total_y + 4.0}, L.total_group1, svg::Anchor::end, 0, "total-group1", 0, true);
    if (!L.total_group2.empty()) doc.text({x_g2, total_y + 4.0}, L.total_group2, svg::Anchor::end, 0, "total-group2", 0, true);
    if (L.diamond) doc.text({x_w, total_y + 4.0}, "100.00%", svg::Anchor::end, 0, "weight", 0, true);
    doc.text({x_est, total_y + 4.0}, L.total_estimate, svg::Anchor::end, 0, "total-estimate", 0, true);
    if (L.diamond) {
        const auto& d = *L.diamond;
        doc.polygon({{d.left, d.y}, {d.center, d.y - d.half_height}, {d.right, d.y}, {d.center, d.y + d.half_height}},
                    svg::Style{pal.pooled, "none", 1.0, "", "diamond"});
    } else {
        doc.text({(L.axis.left + L.axis.right) / 2, total_y + 4.0}, "Not estimable", svg::Anchor::middle, 0, "not-estimable");
    }

    const double axis_top = spec.margin + 40.0;
    const double axis_y = total_y + 18.0;
    doc.line({L.axis.null_x(), axis_top}, {L.axis.null_x(), axis_y}, svg::Style{"none", pal.ink, 1.0, "", "null-line"});
    doc.line({L.axis.left, axis_y}, {L.axis.right, axis_y}, svg::Style{"none", pal.ink, 1.0, "", "axis"});
    for (double t : L.axis.ticks) {
        const double x = L.axis.x(L.axis.to_analysis(t));
        doc.line({x, axis_y}, {x, axis_y + 4.0}, svg::Style{"none", pal.ink, 1.0, "", "tick"});
        doc.text({x, axis_y + 15.0}, detail::tick_label(t), svg::Anchor::middle, 0, "tick-label");
    }
    doc.text({L.axis.null_x() - 6.0, axis_y + 30.0}, labels.left, svg::Anchor::end, 0, "graph-label-left");
    doc.text({L.axis.null_x() + 6.0, axis_y + 30.0}, labels.right, svg::Anchor::start, 0, "graph-label-right");

    doc.text({x_id, axis_y + 15.0}, L.heterogeneity_text, svg::Anchor::start, 0, "heterogeneity");
    doc.text({x_id, axis_y + 30.0}, L.overall_text, svg::Anchor::start, 0, "overall");
    return doc.str();
}

inline std::string render_forest(const PooledResult& r, const ForestLabels& labels = {}, const FigureSpec& spec = {}) {
    return render_forest(layout_forest(r, spec), labels, spec);
}

inline std::string render_forest(const PooledResult& r, const Outcome& outcome, const FigureSpec& spec = {}) {
    return render_forest(r, ForestLabels::from(outcome), spec);
}

} // namespace metakit::render
