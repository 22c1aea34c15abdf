#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "xps/errors.hpp"

namespace xps {

/// Write a minimal static SVG line plot (one polyline per series).
inline void write_svg_lineplot(const std::string& path,
                               const std::vector<double>& x,
                               const std::vector<std::vector<double>>& series,
                               const std::string& title) {
    const int width = 720, height = 440, margin = 50;
    if (x.size() < 2) throw Error("svg: need at least two points");
    double x_lo = x.front(), x_hi = x.front();
    for (double v : x) {
        x_lo = std::min(x_lo, v);
        x_hi = std::max(x_hi, v);
    }
    double y_lo = 0.0, y_hi = 0.0;
    bool first = true;
    for (const auto& s : series)
        for (double v : s) {
            if (first) {
                y_lo = y_hi = v;
                first = false;
            }
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    if (x_hi == x_lo) x_hi = x_lo + 1;
    if (y_hi == y_lo) y_hi = y_lo + 1;

    auto fmt = [](double v) {
        char b[32];
        std::snprintf(b, sizeof(b), "%.6g", v);
        return std::string(b);
    };
    auto px = [&](double v) {
        return margin + (v - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto py = [&](double v) {
        return height - margin -
               (v - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("svg: cannot open " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">" << title
       << "</text>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << height - margin
       << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
       << margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << margin << "\" y=\"" << height - margin + 18
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(x_lo)
       << "</text>\n";
    os << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 18
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << fmt(x_hi) << "</text>\n";
    os << "<text x=\"" << margin - 6 << "\" y=\"" << height - margin
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << fmt(y_lo) << "</text>\n";
    os << "<text x=\"" << margin - 6 << "\" y=\"" << margin + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
          "font-size=\"11\">" << fmt(y_hi) << "</text>\n";
    for (size_t s = 0; s < series.size(); ++s) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[s % 4]
           << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < x.size() && i < series[s].size(); ++i) {
            if (i) os << ' ';
            os << fmt(px(x[i])) << ',' << fmt(py(series[s][i]));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

}  // namespace xps
