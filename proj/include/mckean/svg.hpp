/*
   Copyright 2026 The mckean-lab authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mckean/io.hpp"

namespace mckean {
namespace svg {

struct Series {
    std::string label;
    std::vector<double> x, y;
};

struct ReferenceLine {
    std::string label;
    double y;
};

namespace detail {

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::vector<double> ticks(double lo, double hi, int target = 5) {
    std::vector<double> out;
    const double span = hi - lo;
    if (!(span > 0.0)) return {lo};
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    const double first = std::ceil(lo / step) * step;
    for (double t = first; t <= hi + 1e-12 * span; t += step) out.push_back(t);
    return out;
}

}  // namespace detail

/// Self-contained static line plot: axes, tick labels, legend and optional
/// horizontal reference lines. No external assets.
inline void emit_svg(const std::string& path, const std::string& title, const std::vector<Series>& series,
                     const std::vector<ReferenceLine>& references = {}) {
    if (series.empty()) throw IoError("emit_svg: no series");
    for (const Series& s : series)
        if (s.x.empty() || s.x.size() != s.y.size()) throw IoError("emit_svg: malformed series");

    const double width = 680.0, height = 440.0;
    const double ml = 70.0, mr = 20.0, mt = 40.0, mb = 50.0;

    double xlo = series[0].x[0], xhi = xlo, ylo = series[0].y[0], yhi = ylo;
    for (const Series& s : series) {
        for (double v : s.x) {
            xlo = std::min(xlo, v);
            xhi = std::max(xhi, v);
        }
        for (double v : s.y) {
            ylo = std::min(ylo, v);
            yhi = std::max(yhi, v);
        }
    }
    for (const ReferenceLine& r : references) {
        ylo = std::min(ylo, r.y);
        yhi = std::max(yhi, r.y);
    }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) yhi = ylo + 1.0;
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (width - ml - mr); };
    auto py = [&](double y) { return height - mb - (y - ylo) / (yhi - ylo) * (height - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << detail::escape(title) << "</text>\n";

    // axes
    out << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << height - mb
        << "\" stroke=\"black\"/>\n";
    for (double t : detail::ticks(xlo, xhi)) {
        out << "<line x1=\"" << px(t) << "\" y1=\"" << height - mb << "\" x2=\"" << px(t) << "\" y2=\""
            << height - mb + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(t) << "\" y=\"" << height - mb + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << detail::num(t)
            << "</text>\n";
    }
    for (double t : detail::ticks(ylo, yhi)) {
        out << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << ml << "\" y2=\"" << py(t)
            << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << py(t) + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << detail::num(t)
            << "</text>\n";
    }

    for (const ReferenceLine& r : references) {
        out << "<line x1=\"" << ml << "\" y1=\"" << py(r.y) << "\" x2=\"" << width - mr << "\" y2=\"" << py(r.y)
            << "\" stroke=\"#555555\" stroke-dasharray=\"6,4\"/>\n";
        out << "<text x=\"" << width - mr - 4 << "\" y=\"" << py(r.y) - 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#555555\">"
            << detail::escape(r.label) << "</text>\n";
    }

    for (std::size_t s = 0; s < series.size(); ++s) {
        out << "<polyline fill=\"none\" stroke=\"" << palette[s % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].x.size(); ++i) {
            if (i) out << ' ';
            out << detail::num(px(series[s].x[i])) << ',' << detail::num(py(series[s].y[i]));
        }
        out << "\"/>\n";
    }

    // legend
    for (std::size_t s = 0; s < series.size(); ++s) {
        const double ly = mt + 16.0 * static_cast<double>(s);
        out << "<line x1=\"" << width - mr - 130 << "\" y1=\"" << ly << "\" x2=\"" << width - mr - 110
            << "\" y2=\"" << ly << "\" stroke=\"" << palette[s % 6] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - mr - 104 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::escape(series[s].label)
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace svg
}  // namespace mckean
