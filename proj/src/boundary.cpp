#include "cskor/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace cskor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridClip = 1e-5; // quantile clip of the plotted grid

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

} // namespace

const char* catalog_name(CatalogForm f) {
    switch (f) {
        case CatalogForm::None: return "none";
        case CatalogForm::UniformCatenary: return "uniform_catenary";
        case CatalogForm::ArcsineLower: return "arcsine_lower";
        case CatalogForm::HypsechParabola: return "hypsech_parabola";
        case CatalogForm::CauchyHalfplane: return "cauchy_halfplane";
        case CatalogForm::ArcsineGrossDisc: return "arcsine_gross_disc";
    }
    return "?";
}

double catalog_gamma(CatalogForm f, double x) {
    switch (f) {
        case CatalogForm::UniformCatenary:
            return -(2.0 / kPi) * std::log(2.0 * std::cos(0.5 * kPi * x));
        case CatalogForm::ArcsineLower: {
            const double half = 0.5 * std::acos(-x);
            return -(2.0 / kPi) * (x * std::log(1.0 / std::tan(half)) + 1.0);
        }
        case CatalogForm::HypsechParabola:
            return 0.5 * (x * x - 1.0);
        case CatalogForm::CauchyHalfplane:
            return -1.0;
        case CatalogForm::ArcsineGrossDisc:
            return -std::sqrt(std::max(0.0, 1.0 - x * x));
        case CatalogForm::None:
            break;
    }
    throw ValidationError("no closed form for this curve");
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw ValidationError("interpolant needs >= 2 knots");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw ValidationError("interpolant knots must increase");

    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (delta[i - 1] * delta[i] <= 0.0) {
            d_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // One-sided ends with the standard shape clamp.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (sign_of(d) != sign_of(d0))
            d = 0.0;
        else if (sign_of(d0) != sign_of(d1) && std::fabs(d) > 3.0 * std::fabs(d0))
            d = 3.0 * d0;
        return d;
    };
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
    } else {
        d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    const int buckets = static_cast<int>(2 * n);
    bucket_lo_ = x_.front();
    bucket_scale_ = buckets / (x_.back() - x_.front());
    bucket_.resize(buckets + 1);
    std::size_t idx = 0;
    for (int k = 0; k <= buckets; ++k) {
        const double left = bucket_lo_ + k / bucket_scale_;
        while (idx + 2 < n && x_[idx + 1] <= left) ++idx;
        bucket_[k] = static_cast<int>(idx);
    }
}

double MonotoneCubic::operator()(double x) const {
    const std::size_t n = x_.size();
    if (x <= x_.front()) return y_.front() + d_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + d_.back() * (x - x_.back());
    const int k = std::clamp(static_cast<int>((x - bucket_lo_) * bucket_scale_), 0,
                             static_cast<int>(bucket_.size()) - 2);
    std::size_t lo = bucket_[k];
    while (lo + 2 < n && x_[lo + 1] <= x) ++lo;
    const double h = x_[lo + 1] - x_[lo];
    const double t = (x - x_[lo]) / h;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[lo] + (t3 - 2.0 * t2 + t) * h * d_[lo] +
           (-2.0 * t3 + 3.0 * t2) * y_[lo + 1] + (t3 - t2) * h * d_[lo + 1];
}

BoundaryCurve build_boundary(const AnalyticMap& m, int grid) {
    if (grid < 16) throw ValidationError("boundary grid too small");
    if (!m.series.source) throw ValidationError("boundary needs a map built from a law");
    const Distribution& d = *m.series.source;
    if (d.kind() == DistKind::Atomic || d.kind() == DistKind::Empirical)
        throw ValidationError("atomic laws use the strip/slit domain, not a graph curve");

    BoundaryCurve c;
    c.variant = m.variant;
    const auto [alpha, beta] = d.support();
    c.alpha = alpha;
    c.beta = beta;
    c.tail_clipped = !std::isfinite(alpha) || !std::isfinite(beta);
    c.clip_delta = c.tail_clipped ? kGridClip : 0.0;

    double t_lo = 0.0, t_hi = (m.variant == MapVariant::Gross) ? kPi : kTwoPi;
    if (c.tail_clipped) {
        t_lo = kGridClip * t_hi;
        t_hi -= kGridClip * t_hi;
    }

    c.theta.reserve(grid);
    c.x.reserve(grid);
    c.y.reserve(grid);
    double prev_x = -kInf;
    for (int k = 0; k < grid; ++k) {
        const double theta = t_lo + (t_hi - t_lo) * (k + 0.5) / grid;
        const BoundaryPoint bp = boundary_point(m, theta);
        if (!std::isfinite(bp.y)) continue;
        if (bp.x <= prev_x) continue; // dedup flat quantile stretches
        c.theta.push_back(theta);
        c.x.push_back(bp.x);
        c.y.push_back(bp.y);
        prev_x = bp.x;
    }
    if (c.x.size() < 2) throw NumericError("boundary grid collapsed");
    c.interp = MonotoneCubic(c.x, c.y);

    if (m.variant == MapVariant::FormalCauchy) {
        c.closed_form = CatalogForm::CauchyHalfplane;
    } else if (d.kind() == DistKind::Arcsine) {
        c.closed_form = (m.variant == MapVariant::Gross) ? CatalogForm::ArcsineGrossDisc
                                                         : CatalogForm::ArcsineLower;
    } else if (d.kind() == DistKind::HypSech && m.variant == MapVariant::DeltaInfinity) {
        c.closed_form = CatalogForm::HypsechParabola;
    } else if (d.kind() == DistKind::Uniform && m.variant == MapVariant::DeltaInfinity) {
        const auto [a, b] = d.support();
        if (std::fabs(a + 1.0) < 1e-12 && std::fabs(b - 1.0) < 1e-12)
            c.closed_form = CatalogForm::UniformCatenary;
    }
    return c;
}

double gamma_value(const BoundaryCurve& c, double x) {
    if (!(x > c.alpha && x < c.beta)) throw ValidationError("x outside the support interval");
    return c.interp(x);
}

double gamma_derivative(const BoundaryCurve& c, double x) {
    if (!(x > c.alpha && x < c.beta)) throw ValidationError("x outside the support interval");
    double h = std::max(1e-6, 1e-6 * std::fabs(x));
    if (std::isfinite(c.alpha)) h = std::min(h, 0.5 * (x - c.alpha));
    if (std::isfinite(c.beta)) h = std::min(h, 0.5 * (c.beta - x));
    const double g = (c.interp(x + h) - c.interp(x - h)) / (2.0 * h);
    if (!(std::fabs(g) <= 1e6)) throw NumericError("non-differentiable point");
    return g;
}

double exit_density(const BoundaryCurve& c, const Distribution& d, double x, MapVariant variant) {
    const auto f = d.density(x);
    if (!f) throw ValidationError("density unavailable for this law");
    const double g = gamma_derivative(c, x);
    const double rho = *f / std::sqrt(1.0 + g * g);
    return variant == MapVariant::Gross ? 0.5 * rho : rho;
}

Region membership(const BoundaryCurve& c, double px, double py, double band) {
    if (!(px > c.alpha && px < c.beta)) return Region::Outside;
    const double g = c.interp(px);
    if (c.variant == MapVariant::Gross) {
        // Symmetric domain: the upper boundary is the mirror image -g.
        const double gap = std::min(py - g, -g - py);
        if (gap > band) return Region::Inside;
        if (gap < -band) return Region::Outside;
        return Region::BoundaryBand;
    }
    if (py > g + band) return Region::Inside;
    if (py < g - band) return Region::Outside;
    return Region::BoundaryBand;
}

StripSlitDomain build_strip_slit(const Distribution& atomic_law, int order) {
    if (atomic_law.kind() != DistKind::Atomic && atomic_law.kind() != DistKind::Empirical)
        throw ValidationError("strip/slit domains are built from atomic laws");
    if (!atomic_law.nondegenerate()) throw DegenerateError();
    StripSlitDomain s;
    s.x_left = atomic_law.atoms().front().location;
    s.x_right = atomic_law.atoms().back().location;
    if (atomic_law.atoms().size() > 2) s.slits = slit_tips(atomic_law, order);
    return s;
}

Region membership(const StripSlitDomain& s, double px, double py) {
    const double band = s.band;
    const double wall = std::min(px - s.x_left, s.x_right - px);
    if (wall < -band) return Region::Outside;
    if (wall <= band) return Region::BoundaryBand;
    for (const SlitTip& t : s.slits) {
        const double dx = std::fabs(px - t.x);
        if (dx > 2.0 * band) continue;
        if (py < t.y - band) return dx < band ? Region::Outside : Region::BoundaryBand;
        if (py <= t.y + band) return Region::BoundaryBand;
    }
    return Region::Inside;
}

DomainOracle make_oracle(const BoundaryCurve& c) {
    auto curve = std::make_shared<BoundaryCurve>(c);
    const bool mirrored = c.variant == MapVariant::Gross;
    DomainOracle o;
    o.region = [curve](double x, double y) { return membership(*curve, x, y); };
    o.absorb_gap = [curve, mirrored](double x, double y) {
        if (!(x > curve->alpha && x < curve->beta)) return 0.0;
        const double g = curve->interp(x);
        return mirrored ? std::min(y - g, -g - y) : y - g;
    };
    o.step_scale = [curve, mirrored](double x, double y) {
        const double g = curve->interp(x);
        double d = mirrored ? std::min(y - g, -g - y) : y - g;
        if (std::isfinite(curve->alpha)) d = std::min(d, x - curve->alpha);
        if (std::isfinite(curve->beta)) d = std::min(d, curve->beta - x);
        return d;
    };
    o.project = [curve, mirrored](double x, double y) {
        const double g = curve->interp(x);
        if (mirrored && -g - y < y - g) return std::pair<double, double>(x, -g);
        return std::pair<double, double>(x, g);
    };
    o.probe = [curve, mirrored](double x, double y) {
        DomainProbe p;
        if (!(x > curve->alpha && x < curve->beta)) {
            p.region = Region::Outside;
            return p;
        }
        const double gl = curve->interp(x);
        const double g = mirrored ? std::min(y - gl, -gl - y) : y - gl;
        p.gap = g;
        p.scale = g;
        if (std::isfinite(curve->alpha)) p.scale = std::min(p.scale, x - curve->alpha);
        if (std::isfinite(curve->beta)) p.scale = std::min(p.scale, curve->beta - x);
        p.region = g > 1e-9 ? Region::Inside : (g < -1e-9 ? Region::Outside : Region::BoundaryBand);
        return p;
    };
    return o;
}

DomainOracle make_oracle(const StripSlitDomain& s) {
    auto dom = std::make_shared<StripSlitDomain>(s);
    DomainOracle o;
    o.region = [dom](double x, double y) { return membership(*dom, x, y); };
    auto dist = [dom](double x, double y) {
        double d = std::min(x - dom->x_left, dom->x_right - x);
        for (const SlitTip& t : dom->slits) {
            const double dx = std::max(0.0, std::fabs(x - t.x) - dom->band);
            const double dy = std::max(0.0, y - t.y);
            d = std::min(d, std::hypot(dx, dy));
        }
        return d;
    };
    o.step_scale = dist;
    o.absorb_gap = dist;
    o.project = [dom](double x, double y) {
        // Nearest wall or slit surface.
        double best = x - dom->x_left;
        std::pair<double, double> p{dom->x_left, y};
        if (dom->x_right - x < best) {
            best = dom->x_right - x;
            p = {dom->x_right, y};
        }
        for (const SlitTip& t : dom->slits) {
            if (y <= t.y) {
                const double dx = std::fabs(x - t.x);
                if (dx < best) {
                    best = dx;
                    p = {t.x, y};
                }
            } else {
                const double d = std::hypot(x - t.x, y - t.y);
                if (d < best) {
                    best = d;
                    p = {t.x, t.y};
                }
            }
        }
        return p;
    };
    o.probe = [dom, dist](double x, double y) {
        DomainProbe p;
        p.region = membership(*dom, x, y);
        if (p.region == Region::Inside) {
            p.gap = p.scale = dist(x, y);
        }
        return p;
    };
    return o;
}

} // namespace cskor
