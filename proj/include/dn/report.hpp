#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dn/errors.hpp"
#include "dn/value.hpp"

namespace dn {

/// Fixed-format number rendering; emitted files are byte-identical across
/// runs with the same inputs on one platform.
inline std::string fmt_g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

/// Minimal CSV emitter.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : out_(path) {
        if (!out_) throw ConfigError("cannot open '" + path.string() + "' for writing");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out_ << ',';
            out_ << cells[k];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

/// One polyline of an SVG chart.
struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline double plot_transform(double v, bool log_axis) {
    if (!log_axis) return v;
    return std::log10(std::max(v, 1e-300));
}

} // namespace detail

/// Self-contained line chart writer (no display dependency); axes with five
/// ticks per side, one polyline per series, legend in the top-right corner.
inline void write_svg_chart(const std::filesystem::path& path, const std::string& title,
                            const std::string& xlabel, const std::string& ylabel,
                            const std::vector<PlotSeries>& series, bool logx = false,
                            bool logy = false) {
    const double W = 720, H = 480, L = 70, R = 30, T = 40, B = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            double tx = detail::plot_transform(x, logx);
            double ty = detail::plot_transform(y, logy);
            if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
            xmin = std::min(xmin, tx);
            xmax = std::max(xmax, tx);
            ymin = std::min(ymin, ty);
            ymax = std::max(ymax, ty);
        }
    }
    if (xmin > xmax) {
        xmin = 0;
        xmax = 1;
    }
    if (ymin > ymax) {
        ymin = 0;
        ymax = 1;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    auto px = [&](double x) { return L + (W - L - R) * (x - xmin) / (xmax - xmin); };
    auto py = [&](double y) { return H - B - (H - T - B) * (y - ymin) / (ymax - ymin); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << title << "</text>\n";
    // axes
    out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\""
        << H - B << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 5; ++k) {
        double fx = xmin + (xmax - xmin) * k / 5.0;
        double fy = ymin + (ymax - ymin) * k / 5.0;
        double gx = px(fx), gy = py(fy);
        out << "<line x1=\"" << gx << "\" y1=\"" << H - B << "\" x2=\"" << gx << "\" y2=\""
            << H - B + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << gx << "\" y=\"" << H - B + 18
            << "\" text-anchor=\"middle\" font-size=\"11\">"
            << (logx ? "1e" + fmt_g(fx) : fmt_g(fx)) << "</text>\n";
        out << "<line x1=\"" << L - 5 << "\" y1=\"" << gy << "\" x2=\"" << L << "\" y2=\"" << gy
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << L - 8 << "\" y=\"" << gy + 4
            << "\" text-anchor=\"end\" font-size=\"11\">"
            << (logy ? "1e" + fmt_g(fy) : fmt_g(fy)) << "</text>\n";
    }
    out << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel << "</text>\n";
    out << "<text x=\"16\" y=\"" << (T + H - B) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (T + H - B) / 2 << ")\">" << ylabel << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % 5];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[s].points) {
            double tx = detail::plot_transform(x, logx);
            double ty = detail::plot_transform(y, logy);
            if (!std::isfinite(tx) || !std::isfinite(ty)) continue;
            out << fmt_g(px(tx)) << ',' << fmt_g(py(ty)) << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 16 * s
            << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
            << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace dn
