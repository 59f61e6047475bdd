#pragma once

// Locale-independent number formatting used by figures and reports.

#include <charconv>
#include <cmath>
#include <string>
#include <string_view>

namespace metakit {

/// Fixed-point text rounded half away from zero at `decimals` places.
///
/// Rounding works on the shortest decimal text that round-trips the double,
/// so 2.085 prints as "2.09" even though its binary value is slightly below
/// 2.085.
inline std::string round_half_up(double value, int decimals) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    char buf[400];
    auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::fixed);
    std::string text(buf, res.ptr);
    const bool negative = std::signbit(value);

    std::string int_part = text;
    std::string frac;
    if (auto dot = text.find('.'); dot != std::string::npos) {
        int_part = text.substr(0, dot);
        frac = text.substr(dot + 1);
    }
    bool round_up = false;
    if (static_cast<int>(frac.size()) > decimals) {
        round_up = frac[static_cast<std::size_t>(decimals)] >= '5';
        frac.resize(static_cast<std::size_t>(decimals));
    } else {
        frac.append(static_cast<std::size_t>(decimals) - frac.size(), '0');
    }
    std::string digits = int_part + frac;
    if (round_up) {
        int i = static_cast<int>(digits.size()) - 1;
        while (i >= 0) {
            if (digits[static_cast<std::size_t>(i)] == '9') {
                digits[static_cast<std::size_t>(i)] = '0';
                --i;
            } else {
                ++digits[static_cast<std::size_t>(i)];
                break;
            }
        }
        if (i < 0) digits.insert(digits.begin(), '1');
    }
    const std::size_t int_len = digits.size() - static_cast<std::size_t>(decimals);
    std::string out = digits.substr(0, int_len);
    if (decimals > 0) out += "." + digits.substr(int_len);
    const bool all_zero = out.find_first_not_of("0.") == std::string::npos;
    if (negative && !all_zero) out.insert(out.begin(), '-');
    return out;
}

inline std::string fixed2(double v) { return round_half_up(v, 2); }

// Coordinates in SVG output: always three decimals.
inline std::string fixed3(double v) {
    if (!std::isfinite(v)) return "0.000";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 3);
    std::string s(buf, res.ptr);
    if (s == "-0.000") s = "0.000";
    return s;
}

} // namespace metakit
