#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cskor/errors.hpp"

namespace cskor {

enum class DistKind { Uniform, Arcsine, HypSech, Gaussian, Cauchy, Atomic, Empirical, Custom };

struct Atom {
    double location = 0.0;
    double weight = 0.0;
};

struct SupportMoments {
    double alpha = 0.0; // left support endpoint, may be -inf
    double beta = 0.0;  // right support endpoint, may be +inf
    double mean = 0.0;
    double p_moment = 0.0; // E|X|^p, +inf when divergent
    bool nondegenerate = true;
};

/// One-dimensional probability law exposing the CDF, the right-continuous
/// generalized inverse (quantile), and the density where it exists.
/// Immutable after construction.
class Distribution {
public:
    static Distribution uniform(double a, double b);
    static Distribution arcsine();  // centered and scaled on (-1,1), quantile -cos(pi*u)
    static Distribution hypsech();  // density sech(pi*x/2)/2, unit variance
    static Distribution gaussian(double mean, double sigma);
    static Distribution cauchy();   // no mean; usable only through the formal map variant
    static Distribution atomic(std::vector<Atom> atoms);
    static Distribution from_samples(std::span<const double> values);
    static Distribution custom(std::string label, std::function<double(double)> cdf,
                               double alpha, double beta,
                               std::function<double(double)> density = nullptr);

    /// Total on the reals; exact closed form for builtins.
    double cdf(double x) const;

    /// sup{t : F(t) <= u} for u in (0,1); throws ValidationError outside.
    double quantile(double u) const;

    /// F' where defined; nullopt for atomic/empirical laws.
    std::optional<double> density(double x) const;

    /// Support endpoints, mean and E|X|^p (p > 1) plus the point-mass flag.
    SupportMoments support_and_moments(double p) const;

    /// Shifted copy with zero mean; idempotent. Throws for laws without a mean.
    Distribution centered() const;

    DistKind kind() const { return kind_; }
    double mean() const;
    bool is_centered() const;
    bool nondegenerate() const;
    std::pair<double, double> support() const;
    /// beta - alpha; +inf for unbounded support.
    double support_width() const;
    const std::vector<Atom>& atoms() const { return atoms_; }

    /// Flat key=value form, e.g. "kind=uniform a=-1 b=1".
    std::string spec_string() const;
    static Distribution parse(const std::string& text);

private:
    Distribution() = default;

    DistKind kind_ = DistKind::Custom;
    double p1_ = 0.0, p2_ = 0.0; // uniform: a,b; gaussian: mean,sigma
    double shift_ = 0.0;         // centering shift, custom kind only
    std::vector<Atom> atoms_;
    std::vector<double> cum_; // cumulative atom weights
    std::string label_;
    std::function<double(double)> custom_cdf_;
    std::function<double(double)> custom_density_;
    double custom_alpha_ = 0.0, custom_beta_ = 0.0;
    mutable double cached_mean_ = 0.0;
    mutable bool mean_cached_ = false;
};

/// Monotone CDF inversion: bracketing bisection refined by safeguarded
/// Newton when a density is supplied; relative tolerance 1e-12.
double invert_monotone_cdf(const std::function<double(double)>& cdf, double u, double lo,
                           double hi, const std::function<double(double)>& density = nullptr);

} // namespace cskor
