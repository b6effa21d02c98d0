#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <vector>

#include "cskor/fourier.hpp"

namespace cskor {

enum class MapVariant { DeltaInfinity, Gross, FormalCauchy };

const char* variant_name(MapVariant v);
MapVariant variant_from_name(const std::string& name);

/// Power-series data of the disk map. `coeff[n-1]` holds c_n = a_n - i b_n
/// of the series part; when log_weight > 0 the closed-form term
/// -i(log_weight/pi) Log(1-z) carries the boundary jump (principal branch,
/// cut along [1, inf) in z-space). The map fixes the origin.
struct AnalyticMap {
    MapVariant variant = MapVariant::DeltaInfinity;
    int order = 0;
    std::vector<std::complex<double>> coeff;
    std::complex<double> c0{0.0, 0.0};
    double log_weight = 0.0;
    FourierSeries series; // same data plus clip/source bookkeeping
};

struct BoundaryPoint {
    double x = 0.0;
    double y = 0.0; // +-inf marks an unbounded boundary ordinate
};

struct InjectivityDiagnostic {
    double monotone_violation = 0.0; // largest drop of the boundary real part
    int self_intersections = 0;
    enum class Verdict { Pass, Warn, Fail } verdict = Verdict::Pass;
};

struct SlitTip {
    double x = 0.0;
    double y = 0.0;
};

/// Assemble the disk map for a centered nondegenerate law. DeltaInfinity
/// uses the quantile series (ramp split when the support is bounded),
/// Gross uses the even extension, FormalCauchy returns the closed-form
/// Moebius map with c_n = 2i (outside the moment hypotheses; labeled).
AnalyticMap build_map(const Distribution& d, int order, MapVariant variant,
                      CoeffMode mode = CoeffMode::Auto, int samples = 0);

/// Wrap an existing coefficient series (used by tests and import).
AnalyticMap map_from_series(FourierSeries series, MapVariant variant);

/// Horner evaluation plus closed-form log term; requires |z| <= 1 - 1e-9.
std::complex<double> eval_map(const AnalyticMap& m, std::complex<double> z);

/// Boundary parameterization theta -> (x, y): x from the exact quantile
/// (never the truncated series), y from the conjugate series with its
/// closed-form and tail terms.
BoundaryPoint boundary_point(const AnalyticMap& m, double theta);

/// Samples the boundary on a midpoint grid and reports monotonicity of the
/// real part plus polyline self-intersections. A diagnostic, not a proof.
InjectivityDiagnostic injectivity_check(const AnalyticMap& m, int grid);

/// Tips of the vertical slits of an atomic law's domain: for each interior
/// atom, the maximum of the conjugate over its quantile arc. Laws with
/// fewer than 3 atoms yield no slits (pure strip).
std::vector<SlitTip> slit_tips(const Distribution& d, int order);

/// Schwarz integral of boundary real data at an interior point (|z| <= 0.9)
/// by midpoint quadrature; doubles the sample count once and insists the
/// two answers agree to 1e-6.
std::complex<double> schwarz_eval(const std::function<double(double)>& boundary_real,
                                  std::complex<double> z, int quad_points);

/// Integral means N_r = (avg |f(r e^{i t})|^p)^{1/p} over the given radii.
/// Sets *nondecreasing (when provided) to whether the profile is monotone
/// within quadrature noise.
std::vector<double> hardy_profile(const AnalyticMap& m, double p, std::span<const double> r_grid,
                                  bool* nondecreasing = nullptr);

/// CSV rows "n,Re(c_n),Im(c_n)" of the full power series (log term folded
/// back in) under header "log_weight=<k> c0=<re>,<im> variant=<name>".
void export_map_csv(const AnalyticMap& m, std::ostream& out);
AnalyticMap import_map_csv(std::istream& in);

} // namespace cskor
