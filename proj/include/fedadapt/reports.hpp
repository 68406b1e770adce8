#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fedadapt/errors.hpp"

namespace fedadapt {

// Shortest representation that round-trips exactly; keeps report files
// byte-stable across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double parsed = 0.0;
    std::sscanf(buf, "%lg", &parsed);
    for (int precision = 1; precision < 17; ++precision) {
        char probe[40];
        std::snprintf(probe, sizeof(probe), "%.*g", precision, v);
        std::sscanf(probe, "%lg", &parsed);
        if (parsed == v) return probe;
    }
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
        : out_(path) {
        require(out_.good(), ErrorCategory::Io, "cannot write " + path.string());
        columns_ = header.size();
        write_row(header);
    }

    void write_row(const std::vector<std::string>& cells) {
        require(cells.size() == columns_, ErrorCategory::InvalidArgument,
                "csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

// --- SVG line charts ---------------------------------------------------------

struct ChartSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
    // Optional band around the line (e.g. min/max across seeds); aligned with
    // points when non-empty.
    std::vector<double> band_low;
    std::vector<double> band_high;
};

struct ChartOptions {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<double> horizontal_gridlines;  // e.g. OP action boundaries
    std::vector<double> vertical_markers;      // e.g. bandwidth slot starts
    double y_min = std::nan("");
    double y_max = std::nan("");
};

namespace detail {

inline std::string svg_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace detail

// Minimal deterministic chart writer: fixed palette, fixed geometry, text
// output only.
inline void write_line_chart(const std::filesystem::path& path,
                             const std::vector<ChartSeries>& series, const ChartOptions& options) {
    static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    const double width = 880, height = 540;
    const double left = 70, right = 30, top = 50, bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    bool first = true;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.points.size(); ++i) {
            const auto& [x, y] = s.points[i];
            double lo = y, hi = y;
            if (!s.band_low.empty()) {
                lo = std::min(lo, s.band_low[i]);
                hi = std::max(hi, s.band_high[i]);
            }
            if (first) {
                x_min = x_max = x;
                y_min = lo;
                y_max = hi;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, lo);
                y_max = std::max(y_max, hi);
            }
        }
    }
    if (!std::isnan(options.y_min)) y_min = options.y_min;
    if (!std::isnan(options.y_max)) y_max = options.y_max;
    if (x_max <= x_min) x_max = x_min + 1.0;
    if (y_max <= y_min) y_max = y_min + 1.0;

    const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
    const auto sy = [&](double y) { return top + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

    std::ofstream out(path);
    require(out.good(), ErrorCategory::Io, "cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\" "
           "font-family=\"sans-serif\">"
        << options.title << "</text>\n";

    // Axes.
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = x_min + (x_max - x_min) * t / 5.0;
        const double yv = y_min + (y_max - y_min) * t / 5.0;
        out << "<text x=\"" << detail::svg_coord(sx(xv)) << "\" y=\"" << top + plot_h + 18
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << detail::tick_label(xv) << "</text>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << detail::svg_coord(sy(yv) + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">"
            << detail::tick_label(yv) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 14
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << options.x_label << "</text>\n";
    out << "<text x=\"18\" y=\"" << top + plot_h / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\" "
           "transform=\"rotate(-90 18 "
        << top + plot_h / 2 << ")\">" << options.y_label << "</text>\n";

    for (double g : options.horizontal_gridlines) {
        if (g < y_min || g > y_max) continue;
        out << "<line x1=\"" << left << "\" y1=\"" << detail::svg_coord(sy(g)) << "\" x2=\""
            << left + plot_w << "\" y2=\"" << detail::svg_coord(sy(g))
            << "\" stroke=\"#999999\" stroke-dasharray=\"5,4\"/>\n";
    }
    for (double m : options.vertical_markers) {
        if (m < x_min || m > x_max) continue;
        out << "<line x1=\"" << detail::svg_coord(sx(m)) << "\" y1=\"" << top << "\" x2=\""
            << detail::svg_coord(sx(m)) << "\" y2=\"" << top + plot_h
            << "\" stroke=\"#bbbbbb\" stroke-dasharray=\"2,4\"/>\n";
    }

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        if (!s.band_low.empty() && s.points.size() > 1) {
            out << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < s.points.size(); ++i) {
                out << detail::svg_coord(sx(s.points[i].first)) << ","
                    << detail::svg_coord(sy(std::clamp(s.band_high[i], y_min, y_max))) << " ";
            }
            for (std::size_t i = s.points.size(); i-- > 0;) {
                out << detail::svg_coord(sx(s.points[i].first)) << ","
                    << detail::svg_coord(sy(std::clamp(s.band_low[i], y_min, y_max))) << " ";
            }
            out << "\"/>\n";
        }
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.6\" points=\"";
        for (const auto& [x, y] : s.points) {
            out << detail::svg_coord(sx(x)) << "," << detail::svg_coord(sy(std::clamp(y, y_min, y_max)))
                << " ";
        }
        out << "\"/>\n";
        const double ly = top + 16 + 16 * static_cast<double>(si);
        out << "<line x1=\"" << left + plot_w - 150 << "\" y1=\"" << ly << "\" x2=\""
            << left + plot_w - 126 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << left + plot_w - 120 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
    require(out.good(), ErrorCategory::Io, "write failed: " + path.string());
}

}  // namespace fedadapt
