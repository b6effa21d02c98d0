#include "cskor/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace cskor {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

} // namespace

std::string render_svg(const PlotSpec& spec) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : spec.curve)
        if (std::isfinite(x) && std::isfinite(y)) pts.emplace_back(x, y);
    if (pts.empty()) throw ValidationError("nothing to plot: no finite samples");

    double x0 = spec.x_min, x1 = spec.x_max, y0 = spec.y_min, y1 = spec.y_max;
    if (x0 == x1 || y0 == y1) {
        x0 = y0 = 1e300;
        x1 = y1 = -1e300;
        for (const auto& [x, y] : pts) {
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
        if (spec.mark_origin) {
            x0 = std::min(x0, 0.0);
            x1 = std::max(x1, 0.0);
            y0 = std::min(y0, 0.0);
            y1 = std::max(y1, 0.0);
        }
        const double mx = 0.05 * (x1 - x0 + 1e-12), my = 0.05 * (y1 - y0 + 1e-12);
        x0 -= mx;
        x1 += mx;
        y0 -= my;
        y1 += my;
    }

    const double w = x1 - x0, h = y1 - y0;
    const double stroke = 0.004 * std::max(w, h);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\" "
        << "viewBox=\"" << fmt(x0) << ' ' << fmt(-y1) << ' ' << fmt(w) << ' ' << fmt(h) << "\">\n";
    if (!spec.caption.empty()) out << "  <title>" << spec.caption << "</title>\n";
    // Flip the y axis so data coordinates read mathematically.
    out << "  <g transform=\"scale(1,-1)\">\n";
    out << "    <polyline fill=\"none\" stroke=\"#1f5fa6\" stroke-width=\"" << fmt(stroke)
        << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out << ' ';
        out << fmt(pts[i].first) << ',' << fmt(pts[i].second);
    }
    out << "\"/>\n";
    if (spec.mark_origin) {
        out << "    <circle cx=\"0\" cy=\"0\" r=\"" << fmt(2.0 * stroke)
            << "\" fill=\"#a63030\"/>\n";
    }
    out << "  </g>\n</svg>\n";
    return out.str();
}

} // namespace cskor
