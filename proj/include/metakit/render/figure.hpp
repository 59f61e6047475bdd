#pragma once

#include <string>

#include "metakit/settings.hpp"

namespace metakit::render {

enum class AxisScale { log, linear };

inline AxisScale axis_scale_for(Measure m) { return is_ratio(m) ? AxisScale::log : AxisScale::linear; }

struct Palette {
    std::string low = "#3a9d46";
    std::string unclear = "#f2c94c";
    std::string high = "#d9392b";
    std::string ink = "black";
    std::string study = "#1f5fa8";
    std::string pooled = "black";
};

// Figure geometry in abstract user units (1 unit = 1 px in the SVG).
struct FigureSpec {
    double width = 0.0; // 0 = figure default
    double margin = 20.0;
    double font_size = 11.0;
    Palette palette;
};

} // namespace metakit::render
