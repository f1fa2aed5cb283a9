#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace dualmem {

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
    bool dashed = false;
    bool staircase = false;  // step-after rendering for jump series
};

/// Shaded x-interval, drawn behind the series.
struct ChartBand {
    double x0 = 0;
    double x1 = 0;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<ChartSeries> series;
    std::vector<ChartBand> bands;
};

namespace detail {

inline std::string svg_num(double v) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return std::string(buf.data());
}

inline std::string tick_label(double v) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", v);
    return std::string(buf.data());
}

inline double nice_step(double range, int target_ticks) {
    if (range <= 0) return 1.0;
    const double raw = range / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) return m * mag;
    }
    return 10.0 * mag;
}

inline const char* series_color(std::size_t i) {
    static constexpr std::array<const char*, 8> kPalette = {
        "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
        "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return kPalette[i % kPalette.size()];
}

}  // namespace detail

/// Renders a line chart as a standalone SVG document. Deterministic output:
/// same spec, same bytes.
inline std::string render_chart(const ChartSpec& spec) {
    const double width = 860, height = 540;
    const double left = 72, right = 30, top = 46, bottom = 64;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    bool first = true;
    for (const auto& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    y_min = std::min(y_min, 0.0);  // size charts read best anchored at zero
    if (x_max == x_min) x_max = x_min + 1;
    if (y_max == y_min) y_max = y_min + 1;
    y_max += (y_max - y_min) * 0.05;

    const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";

    for (const auto& band : spec.bands) {
        const double bx0 = sx(std::max(band.x0, x_min));
        const double bx1 = sx(std::min(band.x1, x_max));
        if (bx1 <= bx0) continue;
        out << "<rect x=\"" << detail::svg_num(bx0) << "\" y=\"" << detail::svg_num(top)
            << "\" width=\"" << detail::svg_num(bx1 - bx0) << "\" height=\""
            << detail::svg_num(plot_h) << "\" fill=\"#d0d0d0\" fill-opacity=\"0.45\"/>\n";
    }

    const double x_step = detail::nice_step(x_max - x_min, 6);
    const double y_step = detail::nice_step(y_max - y_min, 6);
    out << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
        out << "<line x1=\"" << detail::svg_num(sx(x)) << "\" y1=\"" << detail::svg_num(top)
            << "\" x2=\"" << detail::svg_num(sx(x)) << "\" y2=\"" << detail::svg_num(top + plot_h)
            << "\"/>\n";
    }
    for (double y = std::ceil(y_min / y_step) * y_step; y <= y_max + 1e-9; y += y_step) {
        out << "<line x1=\"" << detail::svg_num(left) << "\" y1=\"" << detail::svg_num(sy(y))
            << "\" x2=\"" << detail::svg_num(left + plot_w) << "\" y2=\""
            << detail::svg_num(sy(y)) << "\"/>\n";
    }
    out << "</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (double x = std::ceil(x_min / x_step) * x_step; x <= x_max + 1e-9; x += x_step) {
        out << "<text x=\"" << detail::svg_num(sx(x)) << "\" y=\""
            << detail::svg_num(top + plot_h + 18) << "\" text-anchor=\"middle\">"
            << detail::tick_label(x) << "</text>\n";
    }
    for (double y = std::ceil(y_min / y_step) * y_step; y <= y_max + 1e-9; y += y_step) {
        out << "<text x=\"" << detail::svg_num(left - 8) << "\" y=\""
            << detail::svg_num(sy(y) + 4) << "\" text-anchor=\"end\">" << detail::tick_label(y)
            << "</text>\n";
    }
    out << "</g>\n";

    out << "<rect x=\"" << detail::svg_num(left) << "\" y=\"" << detail::svg_num(top)
        << "\" width=\"" << detail::svg_num(plot_w) << "\" height=\"" << detail::svg_num(plot_h)
        << "\" fill=\"none\" stroke=\"#333333\"/>\n";

    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const auto& s = spec.series[i];
        if (s.points.empty()) continue;
        std::ostringstream pts;
        double prev_y = 0;
        for (std::size_t p = 0; p < s.points.size(); ++p) {
            const auto& [x, y] = s.points[p];
            if (s.staircase && p > 0) {
                pts << detail::svg_num(sx(x)) << ',' << detail::svg_num(sy(prev_y)) << ' ';
            }
            pts << detail::svg_num(sx(x)) << ',' << detail::svg_num(sy(y)) << ' ';
            prev_y = y;
        }
        out << "<polyline fill=\"none\" stroke=\"" << detail::series_color(i)
            << "\" stroke-width=\"1.8\"";
        if (s.dashed) out << " stroke-dasharray=\"7 4\"";
        out << " points=\"" << pts.str() << "\"/>\n";
    }

    out << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#111111\">\n";
    out << "<text x=\"" << detail::svg_num(width / 2) << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-size=\"16\">" << spec.title << "</text>\n";
    out << "<text x=\"" << detail::svg_num(left + plot_w / 2) << "\" y=\""
        << detail::svg_num(height - 16) << "\" text-anchor=\"middle\">" << spec.x_label
        << "</text>\n";
    out << "<text x=\"20\" y=\"" << detail::svg_num(top + plot_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
        << detail::svg_num(top + plot_h / 2) << ")\">" << spec.y_label << "</text>\n";
    out << "</g>\n";

    out << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#111111\">\n";
    for (std::size_t i = 0; i < spec.series.size(); ++i) {
        const double ly = top + 16 + 18 * static_cast<double>(i);
        const double lx = left + plot_w - 190;
        out << "<line x1=\"" << detail::svg_num(lx) << "\" y1=\"" << detail::svg_num(ly - 4)
            << "\" x2=\"" << detail::svg_num(lx + 26) << "\" y2=\"" << detail::svg_num(ly - 4)
            << "\" stroke=\"" << detail::series_color(i) << "\" stroke-width=\"1.8\"";
        if (spec.series[i].dashed) out << " stroke-dasharray=\"7 4\"";
        out << "/>\n";
        out << "<text x=\"" << detail::svg_num(lx + 32) << "\" y=\"" << detail::svg_num(ly)
            << "\">" << spec.series[i].label << "</text>\n";
    }
    out << "</g>\n";
    out << "</svg>\n";
    return out.str();
}

}  // namespace dualmem
