#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cskor/errors.hpp"

namespace cskor {

struct PlotSpec {
    std::vector<std::pair<double, double>> curve; // (x, y) samples
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0; // 0-size = auto
    bool mark_origin = true;
    std::string caption;
};

/// Self-contained SVG 1.1 document: the curve polyline in data
/// coordinates (y axis flipped by transform) plus a dot at the origin.
std::string render_svg(const PlotSpec& spec);

} // namespace cskor
