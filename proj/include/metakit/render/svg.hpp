#pragma once

// Minimal SVG 1.1 writer. Element order is insertion order and every
// coordinate is written with three decimals, so equal inputs give equal bytes.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "metakit/format.hpp"

namespace metakit::svg {

struct Point {
    double x = 0;
    double y = 0;
};

inline std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

struct Style {
    std::string fill = "none";
    std::string stroke = "none";
    double stroke_width = 1.0;
    std::string dasharray;
    std::string css_class;
};

enum class Anchor { start, middle, end };

class Document {
public:
    Document(double width, double height, double font_size = 11.0)
        : width_(width), height_(height), font_size_(font_size) {}

    double width() const { return width_; }
    double height() const { return height_; }

    void set_height(double h) { height_ = h; }

    void arrow_marker() { arrow_marker_ = true; }

    void line(Point a, Point b, const Style& s) {
        body_ += "<line" + cls(s) + " x1=\"" + fixed3(a.x) + "\" y1=\"" + fixed3(a.y) + "\" x2=\"" + fixed3(b.x) +
                 "\" y2=\"" + fixed3(b.y) + "\"" + paint(s) + "/>\n";
    }

    void arrow(Point a, Point b, const Style& s) {
        body_ += "<line" + cls(s) + " x1=\"" + fixed3(a.x) + "\" y1=\"" + fixed3(a.y) + "\" x2=\"" + fixed3(b.x) +
                 "\" y2=\"" + fixed3(b.y) + "\"" + paint(s) + " marker-end=\"url(#arrow)\"/>\n";
        arrow_marker_ = true;
    }

    void rect(double x, double y, double w, double h, const Style& s, std::string_view extra = {}) {
        body_ += "<rect" + cls(s) + " x=\"" + fixed3(x) + "\" y=\"" + fixed3(y) + "\" width=\"" + fixed3(w) +
                 "\" height=\"" + fixed3(h) + "\"" + paint(s) + std::string(extra) + "/>\n";
    }

    void circle(Point c, double r, const Style& s) {
        body_ += "<circle" + cls(s) + " cx=\"" + fixed3(c.x) + "\" cy=\"" + fixed3(c.y) + "\" r=\"" + fixed3(r) +
                 "\"" + paint(s) + "/>\n";
    }

    void polygon(const std::vector<Point>& pts, const Style& s) {
        std::string p;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) p += ' ';
            p += fixed3(pts[i].x) + "," + fixed3(pts[i].y);
        }
        body_ += "<polygon" + cls(s) + " points=\"" + p + "\"" + paint(s) + "/>\n";
    }

    void text(Point at, std::string_view content, Anchor anchor = Anchor::start, double size = 0.0,
              std::string_view css_class = {}, double rotate = 0.0, bool bold = false) {
        std::string t = "<text";
        if (!css_class.empty()) t += " class=\"" + std::string(css_class) + "\"";
        t += " x=\"" + fixed3(at.x) + "\" y=\"" + fixed3(at.y) + "\"";
        if (anchor == Anchor::middle) t += " text-anchor=\"middle\"";
        if (anchor == Anchor::end) t += " text-anchor=\"end\"";
        if (size > 0.0) t += " font-size=\"" + fixed3(size) + "\"";
        if (bold) t += " font-weight=\"bold\"";
        if (rotate != 0.0) {
            t += " transform=\"rotate(" + fixed3(rotate) + " " + fixed3(at.x) + " " + fixed3(at.y) + ")\"";
        }
        body_ += t + ">" + escape(content) + "</text>\n";
    }

    std::string str() const {
        std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed3(width_) +
               "\" height=\"" + fixed3(height_) + "\" viewBox=\"0 0 " + fixed3(width_) + " " + fixed3(height_) +
               "\" font-family=\"monospace\" font-size=\"" + fixed3(font_size_) + "\">\n";
        if (arrow_marker_) {
            out += "<defs>\n<marker id=\"arrow\" markerWidth=\"8\" markerHeight=\"8\" refX=\"7\" refY=\"4\" "
                   "orient=\"auto\" markerUnits=\"userSpaceOnUse\">\n<polygon points=\"0,0 8,4 0,8\" "
                   "fill=\"black\"/>\n</marker>\n</defs>\n";
        }
        out += "<rect x=\"0\" y=\"0\" width=\"" + fixed3(width_) + "\" height=\"" + fixed3(height_) +
               "\" fill=\"white\"/>\n";
        out += body_;
        out += "</svg>\n";
        return out;
    }

private:
    static std::string cls(const Style& s) {
        return s.css_class.empty() ? std::string() : " class=\"" + s.css_class + "\"";
    }

    static std::string paint(const Style& s) {
        std::string p = " fill=\"" + s.fill + "\" stroke=\"" + s.stroke + "\"";
        if (s.stroke != "none") p += " stroke-width=\"" + fixed3(s.stroke_width) + "\"";
        if (!s.dasharray.empty()) p += " stroke-dasharray=\"" + s.dasharray + "\"";
        return p;
    }

    double width_;
    double height_;
    double font_size_;
    bool arrow_marker_ = false;
    std::string body_;
};

} // namespace metakit::svg
