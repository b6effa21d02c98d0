#pragma once

#include <complex>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "cskor/distribution.hpp"

namespace cskor {

/// Truncated Fourier data for the boundary angle function. When `split` is
/// set, (a,b) hold the smooth remainder after removing the linear ramp of
/// height `kappa`; the ramp and its harmonic conjugate are evaluated in
/// closed form. Laws with unbounded support are clipped at quantile level
/// `clip_delta`; the clipped-off endpoint slivers are carried exactly and
/// re-added through quadrature corrections.
struct FourierSeries {
    int order = 0;
    std::vector<double> a, b; // 1-based harmonic n stored at [n-1]
    double a0 = 0.0;
    double kappa = 0.0; // jump handled in closed form (0 when direct)
    bool split = false;
    bool cosine_only = false; // even-extension (symmetric-domain) series

    double clip_delta = 0.0; // 0 = no clip
    double clip_lo = 0.0, clip_hi = 0.0;
    std::shared_ptr<const Distribution> source; // required for clip corrections

    bool moment_warning = false; // no finite p-moment found among tested p
};

enum class CoeffMode { Direct, Split, Auto };

/// Boundary angle function: quantile at theta/(2*pi), theta in (0, 2*pi).
double phi_mu(const Distribution& d, double theta);

/// Fourier coefficients of phi via midpoint-rule discrete transform with
/// `samples` >= 8*order equispaced midpoints; exact piecewise integration
/// for uniform and atomic laws. Auto mode splits off the ramp whenever the
/// support is bounded and clip-splits otherwise.
FourierSeries fourier_coeffs(const Distribution& d, int order, int samples, CoeffMode mode);

/// Cosine-only coefficients of the even quantile extension G(|t|/pi) on
/// (-pi, pi); produces the symmetric comparison domain.
FourierSeries gross_coeffs(const Distribution& d, int order, int samples);

/// Sum of a_n sin(n t) - b_n cos(n t) plus the closed-form ramp conjugate
/// and tail corrections. Returns -inf at the logarithmic boundary
/// singularity (t = 0 mod 2*pi with a split ramp).
double conjugate_series(const FourierSeries& s, double theta);

/// Boundary real part reconstructed from the same data (partial sum + ramp
/// + clipped sliver); used for consistency checks.
double partial_sum(const FourierSeries& s, double theta);

/// (partial_sum, conjugate) evaluated in one pass over the coefficients,
/// without ramp or tail terms.
std::complex<double> raw_series_pair(const FourierSeries& s, double theta);

double ramp_value(double kappa, double theta);     // kappa*theta/(2 pi) - kappa/2
double ramp_conjugate(double kappa, double theta); // -(kappa/pi) ln(2 sin(theta/2))

/// Harmonic conjugate of the clipped-off quantile slivers, by quadrature
/// against cot((theta-t)/2). Zero when the series carries no clip.
double sliver_conjugate(const FourierSeries& s, double theta);

/// Schwarz-kernel contribution of the slivers at an interior point.
std::complex<double> sliver_schwarz(const FourierSeries& s, std::complex<double> z);

/// Principal-value quadrature of the circle Hilbert transform of f at
/// theta, refining the excluded window down to eta_min by symmetric-pair
/// summation. Known jump locations of f sharpen the panel layout.
/// Throws NumericError when the refinement has not stabilized.
double hilbert_pv(const std::function<double(double)>& f, double theta, double eta_min,
                  std::span<const double> jump_locations = {});

/// Coefficientwise Hilbert transform (a,b) -> (-b,a); plain series only.
FourierSeries conjugate_coeffs(const FourierSeries& s);

/// Exact coefficient bookkeeping for t -> lambda*t with lambda = num/den
/// in {2, 1/2}; plain series only.
FourierSeries dilate_coeffs(const FourierSeries& s, int num, int den);

/// CSV rows "n,a_n,b_n" carrying the coefficients of phi itself (ramp
/// folded back in when split) under the header
/// "kappa=<v> split=<0|1> a0=<v>" plus clip/source fields when clipped.
void export_series_csv(const FourierSeries& s, std::ostream& out);
FourierSeries import_series_csv(std::istream& in);

} // namespace cskor
