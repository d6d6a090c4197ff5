#include "citeflow/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace citeflow {

namespace {

struct Curve {
    const char* name;
    const char* color;
    double (*pick)(const ScienceSummary&);
};

constexpr Curve kCurves[] = {
    {"wVar(LI)", "#1f77b4", [](const ScienceSummary& s) { return s.w_var_log_impact; }},
    {"wVar(LG)", "#2ca02c", [](const ScienceSummary& s) { return s.w_var_log_growth; }},
    {"wVar(LB)", "#d62728", [](const ScienceSummary& s) { return s.w_var_log_balance; }},
    {"wCov(LG,LB)", "#9467bd", [](const ScienceSummary& s) { return s.w_cov_growth_balance; }},
    {"CEI", "#ff7f0e", [](const ScienceSummary& s) { return s.change_exchange_index; }},
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

}  // namespace

void write_series_chart_svg(const std::vector<SeriesPoint>& points, const std::string& path) {
    constexpr double width = 860, height = 520;
    constexpr double left = 70, right = 210, top = 40, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double y_min = 0.0, y_max = 0.0;
    int x_min = 0, x_max = 0;
    bool any = false;
    for (const SeriesPoint& p : points) {
        if (!p.summary) continue;
        for (const Curve& c : kCurves) {
            double v = c.pick(*p.summary);
            if (!any) {
                y_min = y_max = v;
                x_min = x_max = p.cited_year;
                any = true;
            }
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
        x_min = std::min(x_min, p.cited_year);
        x_max = std::max(x_max, p.cited_year);
    }
    if (!any) {
        x_min = points.empty() ? 0 : points.front().cited_year;
        x_max = points.empty() ? 1 : points.back().cited_year;
        y_min = 0.0;
        y_max = 1.0;
    }
    y_min = std::min(y_min, 0.0);
    if (y_max - y_min < 1e-12) y_max = y_min + 1.0;
    double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto map_x = [&](double year) {
        double span = std::max(1.0, static_cast<double>(x_max - x_min));
        return left + (year - x_min) / span * plot_w;
    };
    auto map_y = [&](double v) { return top + (1.0 - (v - y_min) / (y_max - y_min)) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "  <text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">"
        << "dispersion of normalized impact and its factors</text>\n";

    // Axes, zero line, year ticks.
    svg << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    double zero_y = map_y(0.0);
    svg << "  <line x1=\"" << left << "\" y1=\"" << fmt(zero_y) << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << fmt(zero_y) << "\" stroke=\"#bbb\" stroke-dasharray=\"4,3\"/>\n";
    for (int year = x_min; year <= x_max; ++year) {
        double x = map_x(year);
        svg << "  <line x1=\"" << fmt(x) << "\" y1=\"" << top + plot_h << "\" x2=\"" << fmt(x)
            << "\" y2=\"" << top + plot_h + 5 << "\" stroke=\"#333\"/>\n"
            << "  <text x=\"" << fmt(x) << "\" y=\"" << top + plot_h + 22
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">" << year
            << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        double v = y_min + (y_max - y_min) * i / 4.0;
        double y = map_y(v);
        svg << "  <line x1=\"" << left - 5 << "\" y1=\"" << fmt(y) << "\" x2=\"" << left
            << "\" y2=\"" << fmt(y) << "\" stroke=\"#333\"/>\n"
            << "  <text x=\"" << left - 9 << "\" y=\"" << fmt(y + 4)
            << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fmt(v)
            << "</text>\n";
    }

    for (const Curve& curve : kCurves) {
        std::ostringstream d;
        bool pen_down = false;
        for (const SeriesPoint& p : points) {
            if (!p.summary) {
                pen_down = false;  // failed point leaves a gap
                continue;
            }
            d << (pen_down ? " L " : " M ") << fmt(map_x(p.cited_year)) << ' '
              << fmt(map_y(curve.pick(*p.summary)));
            pen_down = true;
        }
        std::string path_data = d.str();
        if (!path_data.empty())
            svg << "  <path d=\"" << path_data << "\" fill=\"none\" stroke=\"" << curve.color
                << "\" stroke-width=\"2\"/>\n";
        for (const SeriesPoint& p : points) {
            if (!p.summary) continue;
            svg << "  <circle cx=\"" << fmt(map_x(p.cited_year)) << "\" cy=\""
                << fmt(map_y(curve.pick(*p.summary))) << "\" r=\"2.5\" fill=\"" << curve.color
                << "\"/>\n";
        }
    }

    // Legend.
    double ly = top + 10;
    for (const Curve& curve : kCurves) {
        svg << "  <line x1=\"" << width - right + 14 << "\" y1=\"" << fmt(ly) << "\" x2=\""
            << width - right + 40 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << curve.color
            << "\" stroke-width=\"2\"/>\n"
            << "  <text x=\"" << width - right + 46 << "\" y=\"" << fmt(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << curve.name << "</text>\n";
        ly += 20;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << svg.str();
}

}  // namespace citeflow
