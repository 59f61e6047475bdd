#pragma once

// Funnel plot: effect (analysis scale) against standard error, with the
// standard error axis inverted so precise studies sit at the top.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "metakit/bias.hpp"
#include "metakit/format.hpp"
#include "metakit/render/figure.hpp"
#include "metakit/render/svg.hpp"

namespace metakit::render {

struct FunnelMarker {
    std::string study_id;
    double x = 0, y = 0;
    bool imputed = false;
};

struct FunnelLayout {
    double width = 0, height = 0;
    double plot_left = 0, plot_right = 0, plot_top = 0, plot_bottom = 0;
    double center_x = 0;   // pooled line
    double x_per_unit = 0; // user units per analysis-scale unit
    double pooled = 0;
    double se_max = 0;
    std::vector<FunnelMarker> markers;
    svg::Point apex, base_low, base_high; // pseudo-CI triangle

    double x(double effect) const { return center_x + (effect - pooled) * x_per_unit; }
    double y(double se) const { return plot_top + se / se_max * (plot_bottom - plot_top); }
};

namespace detail {

inline double nice_ceiling(double v) {
    if (!(v > 0.0)) return 1.0;
    const double mag = std::pow(10.0, std::floor(std::log10(v)));
    for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
        if (m * mag >= v) return m * mag;
    }
    return 10.0 * mag;
}

} // namespace detail

inline FunnelLayout layout_funnel(const FunnelData& f, const FigureSpec& spec = {}) {
    FunnelLayout L;
    L.width = spec.width > 0 ? spec.width : 560.0;
    L.height = 440.0;
    L.plot_left = spec.margin + 50.0;
    L.plot_right = L.width - spec.margin;
    L.plot_top = spec.margin + 20.0;
    L.plot_bottom = L.height - spec.margin - 50.0;
    L.pooled = f.pooled_line;

    double se_max = 0.0;
    double dev_max = 0.0;
    auto scan = [&](const std::vector<FunnelPoint>& pts) {
        for (const auto& p : pts) {
            if (std::isfinite(p.se)) se_max = std::max(se_max, p.se);
            if (std::isfinite(p.effect)) dev_max = std::max(dev_max, std::fabs(p.effect - f.pooled_line));
        }
    };
    scan(f.points);
    scan(f.imputed);
    L.se_max = detail::nice_ceiling(se_max * 1.05);
    const double half = std::max(dev_max, f.z * L.se_max) * 1.05;
    L.center_x = (L.plot_left + L.plot_right) / 2.0;
    L.x_per_unit = (L.plot_right - L.plot_left) / 2.0 / (half > 0.0 ? half : 1.0);

    for (const auto& p : f.points) L.markers.push_back({p.study_id, L.x(p.effect), L.y(p.se), false});
    for (const auto& p : f.imputed) L.markers.push_back({p.study_id, L.x(p.effect), L.y(p.se), true});

    L.apex = {L.x(f.boundary_low(0.0)), L.y(0.0)};
    L.base_low = {L.x(f.boundary_low(L.se_max)), L.y(L.se_max)};
    L.base_high = {L.x(f.boundary_high(L.se_max)), L.y(L.se_max)};
    return L;
}

inline std::string render_funnel(const FunnelLayout& L, Measure measure, const FigureSpec& spec = {}) {
    svg::Document doc(L.width, L.height, spec.font_size);
    const auto& pal = spec.palette;
    const svg::Style frame{"none", pal.ink, 1.0, "", "frame"};
    doc.rect(L.plot_left, L.plot_top, L.plot_right - L.plot_left, L.plot_bottom - L.plot_top, frame);

    const svg::Style pseudo{"none", pal.ink, 1.0, "4,3", "pseudo-ci"};
    doc.line(L.apex, L.base_low, pseudo);
    doc.line(L.apex, L.base_high, pseudo);
    doc.line({L.center_x, L.plot_top}, {L.center_x, L.plot_bottom}, svg::Style{"none", pal.ink, 1.0, "", "pooled-line"});

    // SE axis (inverted: 0 at the top).
    for (int i = 0; i <= 4; ++i) {
        const double se = L.se_max * i / 4.0;
        const double y = L.y(se);
        doc.line({L.plot_left - 4.0, y}, {L.plot_left, y}, svg::Style{"none", pal.ink, 1.0, "", "tick"});
        doc.text({L.plot_left - 7.0, y + 4.0}, round_half_up(se, 2), svg::Anchor::end, 0, "tick-label");
    }
    doc.text({spec.margin + 8.0, (L.plot_top + L.plot_bottom) / 2.0},
             is_ratio(measure) ? "SE(log " + std::string(abbreviation(measure)) + ")" : "SE(RD)",
             svg::Anchor::middle, 0, "axis-label", -90.0);

    // Effect axis, labelled on the natural scale.
    std::vector<double> ticks;
    const double lo = L.pooled - (L.center_x - L.plot_left) / L.x_per_unit;
    const double hi = L.pooled + (L.plot_right - L.center_x) / L.x_per_unit;
    if (is_ratio(measure)) {
        for (double t : {0.001, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 1000.0}) {
            if (std::log(t) >= lo && std::log(t) <= hi) ticks.push_back(t);
        }
    } else {
        const double step = detail::nice_ceiling((hi - lo) / 6.0);
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-12; t += step) ticks.push_back(t);
    }
    for (double t : ticks) {
        const double x = L.x(is_ratio(measure) ? std::log(t) : t);
        doc.line({x, L.plot_bottom}, {x, L.plot_bottom + 4.0}, svg::Style{"none", pal.ink, 1.0, "", "tick"});
        doc.text({x, L.plot_bottom + 16.0}, round_half_up(t, is_ratio(measure) ? 3 : 2), svg::Anchor::middle, 0,
                 "tick-label");
    }
    doc.text({L.center_x, L.plot_bottom + 34.0}, std::string(abbreviation(measure)), svg::Anchor::middle, 0,
             "axis-label");

    const svg::Style open{"white", pal.ink, 1.0, "", "funnel-point"};
    const svg::Style filled{pal.ink, pal.ink, 1.0, "", "funnel-imputed"};
    for (const auto& m : L.markers) doc.circle({m.x, m.y}, 4.0, m.imputed ? filled : open);
    return doc.str();
}

inline std::string render_funnel(const FunnelData& f, const FigureSpec& spec = {}) {
    return render_funnel(layout_funnel(f, spec), f.measure, spec);
}

} // namespace metakit::render
