#pragma once

// Minimal self-contained SVG line plots for trajectory time series.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace centroflow::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

inline void write_line_plot(std::ostream& out, const std::string& title,
                            const std::vector<Series>& series, int width = 720,
                            int height = 440) {
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool first = true;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (first) {
                xmin = xmax = s.x[i];
                ymin = ymax = s.y[i];
                first = false;
            }
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double ml = 70, mr = 20, mt = 40, mb = 45;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    const auto py = [&](double y) { return mt + ph - (y - ymin) / (ymax - ymin) * ph; };

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n<rect width='100%' height='100%' fill='white'/>\n";
    out << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // axes
    out << "<line x1='" << ml << "' y1='" << mt + ph << "' x2='" << ml + pw << "' y2='"
        << mt + ph << "' stroke='black'/>\n";
    out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << mt + ph
        << "' stroke='black'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        std::ostringstream xs, ys;
        xs.precision(4);
        ys.precision(4);
        xs << xv;
        ys << yv;
        out << "<text x='" << px(xv) << "' y='" << mt + ph + 18
            << "' text-anchor='middle' font-size='11'>" << xs.str() << "</text>\n";
        out << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='11'>" << ys.str() << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 5] << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            out << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        }
        out << "'/>\n";
        out << "<text x='" << ml + pw - 6 << "' y='" << mt + 16 + 16 * ci
            << "' text-anchor='end' font-size='12' fill='" << colors[ci % 5] << "'>" << s.label
            << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
}

}  // namespace centroflow::svg
