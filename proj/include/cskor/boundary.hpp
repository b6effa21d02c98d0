#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cskor/analytic_map.hpp"

namespace cskor {

enum class Region { Inside, Outside, BoundaryBand };

enum class CatalogForm {
    None,
    UniformCatenary,  // -(2/pi) ln(2 cos(pi x/2))
    ArcsineLower,     // -(2/pi)(x ln cot(arccos(-x)/2) + 1)
    HypsechParabola,  // (x^2 - 1)/2
    CauchyHalfplane,  // -1
    ArcsineGrossDisc, // -sqrt(1 - x^2)
};

const char* catalog_name(CatalogForm f);
double catalog_gamma(CatalogForm f, double x);

/// Shape-preserving piecewise-cubic interpolant on strictly increasing
/// knots (Fritsch-Carlson slopes); linear end-slope extrapolation.
class MonotoneCubic {
public:
    MonotoneCubic() = default;
    MonotoneCubic(std::vector<double> x, std::vector<double> y);
    double operator()(double x) const;
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, d_;
    // Uniform bucket index over [x_front, x_back] for O(1) segment lookup.
    std::vector<int> bucket_;
    double bucket_lo_ = 0.0, bucket_scale_ = 0.0;
};

/// Lower boundary y = gamma(x) of a constructed domain, sampled on a
/// midpoint angle grid. The grid of unbounded-support laws is clipped to
/// the quantile range [G(delta), G(1-delta)], delta = 1e-5 (recorded).
struct BoundaryCurve {
    double alpha = 0.0, beta = 0.0; // support interval of x
    std::vector<double> theta, x, y;
    MonotoneCubic interp;
    CatalogForm closed_form = CatalogForm::None;
    bool tail_clipped = false;
    double clip_delta = 0.0;
    MapVariant variant = MapVariant::DeltaInfinity;
};

BoundaryCurve build_boundary(const AnalyticMap& m, int grid = 4096);

/// gamma(x) for x strictly inside the support; throws outside.
double gamma_value(const BoundaryCurve& c, double x);

/// Central finite differences on the interpolant, step max(1e-6, 1e-6|x|).
/// Near-vertical sections (|slope| > 1e6) throw rather than extrapolate.
double gamma_derivative(const BoundaryCurve& c, double x);

/// Exit-position density with respect to x: F'(x)/sqrt(1 + gamma'(x)^2);
/// the symmetric (two-sided) variant halves it per side.
double exit_density(const BoundaryCurve& c, const Distribution& d, double x, MapVariant variant);

Region membership(const BoundaryCurve& c, double px, double py, double band = 1e-9);

/// Strip with vertical slits removed: the domain of an atomic law. Slits
/// are widened to `band` so discrete paths can detect crossings.
struct StripSlitDomain {
    double x_left = 0.0, x_right = 0.0;
    std::vector<SlitTip> slits;
    double band = 1e-9;
};

StripSlitDomain build_strip_slit(const Distribution& atomic_law, int order = 8192);
Region membership(const StripSlitDomain& s, double px, double py);

/// Geometry callbacks consumed by the path simulator. `step_scale` is a
/// conservative distance to the boundary controlling the step size;
/// `absorb_gap` is a distance for which `project` lands on the boundary.
/// `probe` bundles all three per-step queries into one call.
struct DomainProbe {
    Region region = Region::Inside;
    double gap = 0.0;   // absorbable distance
    double scale = 0.0; // step distance scale
};

struct DomainOracle {
    std::function<Region(double, double)> region;
    std::function<double(double, double)> step_scale;
    std::function<double(double, double)> absorb_gap;
    std::function<std::pair<double, double>(double, double)> project;
    std::function<DomainProbe(double, double)> probe;
};

DomainOracle make_oracle(const BoundaryCurve& c);
DomainOracle make_oracle(const StripSlitDomain& s);

} // namespace cskor
