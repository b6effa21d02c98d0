#include "cskor/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cskor/quadrature.hpp"

namespace cskor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Quantile clip level for laws with unbounded support. Softer than the
// plotting clip so the clamp corner stays benign in the coefficient tail;
// everything outside is restored by the sliver corrections.
constexpr double kClipDelta = 1e-3;

// s-range of the u = delta*exp(-s) endpoint substitution.
constexpr double kSliverRange = 80.0;

double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Linear segment phi = p + q*(t - t0) on [t0, t1]; accumulates its exact
// contribution to the order-n cosine/sine coefficients.
struct Segment {
    double t0, t1, p, q;
};

void accumulate_exact(const std::vector<Segment>& segs, int order, std::vector<double>& a,
                      std::vector<double>& b, double& a0) {
    a.assign(order, 0.0);
    b.assign(order, 0.0);
    a0 = 0.0;
    for (const Segment& s : segs) {
        const double len = s.t1 - s.t0;
        a0 += (s.p + 0.5 * s.q * len) * len / kTwoPi;
    }
    for (int n = 1; n <= order; ++n) {
        double an = 0.0, bn = 0.0;
        for (const Segment& s : segs) {
            const double s0 = std::sin(n * s.t0), c0 = std::cos(n * s.t0);
            const double s1 = std::sin(n * s.t1), c1 = std::cos(n * s.t1);
            const double phi0 = s.p;
            const double phi1 = s.p + s.q * (s.t1 - s.t0);
            an += (phi1 * s1 - phi0 * s0) / n + s.q * (c1 - c0) / (n * n);
            bn += -(phi1 * c1 - phi0 * c0) / n + s.q * (s1 - s0) / (n * n);
        }
        a[n - 1] = an / kPi;
        b[n - 1] = bn / kPi;
    }
}

// Midpoint-rule discrete transform: full-period uniform sampling keeps
// orthogonality, so the only error is aliasing of harmonics above M-N.
void midpoint_dft(const std::function<double(double)>& g, int samples, int order,
                  std::vector<double>& a, std::vector<double>& b, double& a0) {
    std::vector<double> acc_re(order, 0.0), acc_im(order, 0.0);
    double sum = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double theta = kTwoPi * (j + 0.5) / samples;
        const double gj = g(theta);
        sum += gj;
        const double wr = std::cos(theta), wi = std::sin(theta);
        double xr = wr, xi = wi; // e^{i n theta}
        for (int n = 0; n < order; ++n) {
            acc_re[n] += gj * xr;
            acc_im[n] += gj * xi;
            const double nr = xr * wr - xi * wi;
            xi = xr * wi + xi * wr;
            xr = nr;
        }
    }
    a.resize(order);
    b.resize(order);
    for (int n = 0; n < order; ++n) {
        a[n] = 2.0 * acc_re[n] / samples;
        b[n] = 2.0 * acc_im[n] / samples;
    }
    a0 = sum / samples;
}

bool has_unbounded_support(const Distribution& d) {
    const auto [lo, hi] = d.support();
    return !std::isfinite(lo) || !std::isfinite(hi);
}

// One clipped-off endpoint sliver in quantile space.
struct Sliver {
    double u_edge;   // clip level delta
    bool left;       // u in (0, delta) vs (1-delta, 1)
    double clamp_to; // quantile value at the clip level
};

// Integral over one sliver of (G(u) - clamp) * weight(2*pi*u) du with the
// exponential substitution u -> edge*exp(-s) that tames the quantile
// blow-up. `pole_u` (if inside) marks a simple pole of the weight.
double sliver_integral(const Distribution& d, const Sliver& sv,
                       const std::function<double(double)>& weight_of_t, double pole_u) {
    auto integrand = [&](double s) {
        const double du = sv.u_edge * std::exp(-s);
        const double u = sv.left ? du : 1.0 - du;
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double val = d.quantile(u) - sv.clamp_to;
        return val * weight_of_t(kTwoPi * u) * du;
    };
    double pole_s = -1.0;
    if (pole_u > 0.0 && pole_u < 1.0) {
        const double du = sv.left ? pole_u : 1.0 - pole_u;
        if (du > 0.0 && du < sv.u_edge) pole_s = std::log(sv.u_edge / du);
    }
    if (pole_s > 0.0 && pole_s < kSliverRange)
        return pv_integrate(integrand, 0.0, kSliverRange, pole_s, 1e-12, 1e-11);
    return integrate(integrand, 0.0, kSliverRange, 1e-12, 1e-11).value;
}

void check_inputs(const Distribution& d, int order, int samples) {
    if (order < 1) throw ValidationError("order must be at least 1");
    if (samples < 8 * order) throw ValidationError("sample count must be at least 8x the order");
    if (!d.nondegenerate()) throw DegenerateError();
    if (d.kind() != DistKind::Cauchy && !d.is_centered())
        throw ValidationError("law must be centered first");
}

} // namespace

double phi_mu(const Distribution& d, double theta) {
    if (!(theta > 0.0 && theta < kTwoPi))
        throw ValidationError("theta must lie in (0, 2*pi); the endpoints may be unbounded");
    if (!d.nondegenerate()) throw DegenerateError();
    if (d.kind() != DistKind::Cauchy && !d.is_centered())
        throw ValidationError("law must be centered first");
    return d.quantile(theta / kTwoPi);
}

FourierSeries fourier_coeffs(const Distribution& d, int order, int samples, CoeffMode mode) {
    check_inputs(d, order, samples);

    FourierSeries out;
    out.order = order;
    out.source = std::make_shared<Distribution>(d);

    // Moment sanity: the construction needs some finite p-moment above 1.
    if (d.kind() == DistKind::Cauchy) {
        out.moment_warning = true;
    } else if (d.kind() == DistKind::Custom || d.kind() == DistKind::Gaussian) {
        bool finite = false;
        for (double p : {2.0, 1.5, 1.2, 1.05}) {
            if (std::isfinite(d.support_and_moments(p).p_moment)) {
                finite = true;
                break;
            }
        }
        out.moment_warning = !finite;
    }

    const bool unbounded = has_unbounded_support(d);
    bool split = false;
    switch (mode) {
        case CoeffMode::Direct:
            split = false;
            break;
        case CoeffMode::Split:
            if (unbounded) throw ValidationError("split mode requires a finite support jump");
            split = true;
            break;
        case CoeffMode::Auto:
            split = true; // unbounded support uses the clipped jump
            break;
    }

    if (!unbounded &&
        (d.kind() == DistKind::Uniform || d.kind() == DistKind::Atomic ||
         d.kind() == DistKind::Empirical)) {
        // Piecewise-linear quantile: integrate phi * trig in closed form.
        std::vector<Segment> segs;
        if (d.kind() == DistKind::Uniform) {
            const auto [lo, hi] = d.support();
            segs.push_back({0.0, kTwoPi, lo, (hi - lo) / kTwoPi});
        } else {
            double c = 0.0;
            for (const Atom& atom : d.atoms()) {
                segs.push_back({kTwoPi * c, kTwoPi * std::min(1.0, c + atom.weight), atom.location, 0.0});
                c += atom.weight;
            }
            segs.back().t1 = kTwoPi;
        }
        accumulate_exact(segs, order, out.a, out.b, out.a0);
        if (split) {
            const double kappa = d.support_width();
            for (int n = 1; n <= order; ++n) out.b[n - 1] += kappa / (kPi * n);
            out.kappa = kappa;
            out.split = true;
        }
        return out;
    }

    if (!unbounded) {
        // Always transform the smooth remainder; the ramp's coefficients
        // -kappa/(pi n) are exact, so folding them back for direct mode
        // avoids the O((n/M)^2) jump aliasing of a raw transform.
        const double kappa = d.support_width();
        auto g = [&d, kappa](double theta) {
            return d.quantile(theta / kTwoPi) - ramp_value(kappa, theta);
        };
        midpoint_dft(g, samples, order, out.a, out.b, out.a0);
        if (split) {
            out.kappa = kappa;
            out.split = true;
        } else {
            for (int n = 1; n <= order; ++n) out.b[n - 1] -= kappa / (kPi * n);
        }
        return out;
    }

    // Unbounded support: clip the quantile at [delta, 1-delta]; the clipped
    // function has the finite jump clip_hi-clip_lo, handled by the usual
    // ramp, and the slivers are re-added exactly at evaluation time.
    const double delta = kClipDelta;
    const double lo = d.quantile(delta), hi = d.quantile(1.0 - delta);
    const double kappa_eff = hi - lo;
    auto g = [&d, lo, hi, kappa_eff](double theta) {
        return std::clamp(d.quantile(theta / kTwoPi), lo, hi) - ramp_value(kappa_eff, theta);
    };
    midpoint_dft(g, samples, order, out.a, out.b, out.a0);
    out.clip_delta = delta;
    out.clip_lo = lo;
    out.clip_hi = hi;
    if (split) {
        out.kappa = kappa_eff;
        out.split = true;
    } else {
        for (int n = 1; n <= order; ++n) out.b[n - 1] -= kappa_eff / (kPi * n);
    }
    return out;
}

FourierSeries gross_coeffs(const Distribution& d, int order, int samples) {
    check_inputs(d, order, samples);
    if (d.kind() == DistKind::Cauchy)
        throw ValidationError("the symmetric construction needs an integrable law");

    FourierSeries out;
    out.order = order;
    out.cosine_only = true;
    out.source = std::make_shared<Distribution>(d);

    double lo = -kInf, hi = kInf;
    if (has_unbounded_support(d)) {
        out.clip_delta = kClipDelta;
        lo = d.quantile(kClipDelta);
        hi = d.quantile(1.0 - kClipDelta);
        out.clip_lo = lo;
        out.clip_hi = hi;
    }

    // Half-range cosine transform of G on (0,1), midpoint sampled.
    std::vector<double> acc(order, 0.0);
    double sum = 0.0;
    for (int j = 0; j < samples; ++j) {
        const double u = (j + 0.5) / samples;
        double gj = d.quantile(u);
        if (out.clip_delta > 0.0) gj = std::clamp(gj, lo, hi);
        sum += gj;
        const double base = kPi * u;
        for (int n = 1; n <= order; ++n) acc[n - 1] += gj * std::cos(n * base);
    }
    out.a.resize(order);
    out.b.assign(order, 0.0);
    for (int n = 0; n < order; ++n) out.a[n] = 2.0 * acc[n] / samples;
    out.a0 = sum / samples;
    return out;
}

double ramp_value(double kappa, double theta) { return kappa * theta / kTwoPi - 0.5 * kappa; }

double ramp_conjugate(double kappa, double theta) {
    const double s = std::sin(0.5 * wrap_angle(theta));
    if (s <= 0.0) return -kInf;
    return -(kappa / kPi) * std::log(2.0 * s);
}

std::complex<double> raw_series_pair(const FourierSeries& s, double theta) {
    const double wr = std::cos(theta), wi = std::sin(theta);
    double xr = wr, xi = wi;
    double re = 0.0, im = 0.0;
    for (int n = 0; n < s.order; ++n) {
        const double an = s.a[n], bn = s.b[n];
        re += an * xr + bn * xi;
        im += an * xi - bn * xr;
        if ((n & 1023) == 1023) {
            // refresh the rotation to cap drift over long series
            xr = std::cos((n + 2) * theta);
            xi = std::sin((n + 2) * theta);
        } else {
            const double nr = xr * wr - xi * wi;
            xi = xr * wi + xi * wr;
            xr = nr;
        }
    }
    return {re, im};
}

double sliver_conjugate(const FourierSeries& s, double theta) {
    if (s.clip_delta <= 0.0 || s.cosine_only) return 0.0;
    if (!s.source) throw ValidationError("clipped series lost its source law");
    const double tm = wrap_angle(theta);
    auto weight = [tm](double t) { return 1.0 / std::tan(0.5 * (tm - t)); };
    const double pole_u = tm / kTwoPi;
    const Sliver left{s.clip_delta, true, s.clip_lo};
    const Sliver right{s.clip_delta, false, s.clip_hi};
    return sliver_integral(*s.source, left, weight, pole_u) +
           sliver_integral(*s.source, right, weight, pole_u);
}

std::complex<double> sliver_schwarz(const FourierSeries& s, std::complex<double> z) {
    if (s.clip_delta <= 0.0 || s.cosine_only) return {0.0, 0.0};
    if (!s.source) throw ValidationError("clipped series lost its source law");
    const Sliver left{s.clip_delta, true, s.clip_lo};
    const Sliver right{s.clip_delta, false, s.clip_hi};
    std::complex<double> total{0.0, 0.0};
    for (int part = 0; part < 2; ++part) {
        auto weight = [z, part](double t) {
            const std::complex<double> e{std::cos(t), std::sin(t)};
            const std::complex<double> k = (e + z) / (e - z);
            return part == 0 ? k.real() : k.imag();
        };
        const double re = sliver_integral(*s.source, left, weight, -1.0) +
                          sliver_integral(*s.source, right, weight, -1.0);
        if (part == 0)
            total += re;
        else
            total += std::complex<double>(0.0, re);
    }
    return total;
}

double conjugate_series(const FourierSeries& s, double theta) {
    const double tm = wrap_angle(theta);
    double value = raw_series_pair(s, tm).imag();
    if (s.split) {
        const double rc = ramp_conjugate(s.kappa, tm);
        if (!std::isfinite(rc)) return -kInf;
        value += rc;
    }
    if (s.clip_delta > 0.0) value += sliver_conjugate(s, tm);
    return value;
}

double partial_sum(const FourierSeries& s, double theta) {
    const double tm = wrap_angle(theta);
    double value = raw_series_pair(s, tm).real() + s.a0;
    if (s.split) value += ramp_value(s.kappa, tm);
    if (s.clip_delta > 0.0 && !s.cosine_only && s.source && tm > 0.0) {
        const double phi = s.source->quantile(tm / kTwoPi);
        value += phi - std::clamp(phi, s.clip_lo, s.clip_hi);
    }
    return value;
}

double hilbert_pv(const std::function<double(double)>& f, double theta, double eta_min,
                  std::span<const double> jump_locations) {
    if (!(eta_min > 0.0 && eta_min < 1.0)) throw ValidationError("eta_min must lie in (0,1)");

    auto h = [&f, theta](double t) {
        const double diff = f(wrap_angle(theta - t)) - f(wrap_angle(theta + t));
        return diff / (kTwoPi * std::tan(0.5 * t));
    };

    std::vector<double> breakpoints;
    for (double s : jump_locations) {
        for (double t : {wrap_angle(theta - s), wrap_angle(s - theta)}) {
            if (t > eta_min && t < kPi) breakpoints.push_back(t);
            if (kTwoPi - t > eta_min && kTwoPi - t < kPi) breakpoints.push_back(kTwoPi - t);
        }
    }

    const double eta_hi = std::min(4.0 * eta_min, kPi);
    const QuadResult main = integrate(h, eta_hi, kPi, 1e-10, 1e-10, breakpoints);
    const QuadResult band = integrate(h, eta_min, eta_hi, 1e-10, 1e-10, breakpoints);
    if (!main.converged || !band.converged || std::fabs(band.value) > 1e-6 * std::max(1.0, std::fabs(main.value + band.value)))
        throw NumericError("PV did not stabilize");
    return main.value + band.value;
}

namespace {

void require_plain(const FourierSeries& s, const char* who) {
    if (s.split || s.kappa != 0.0 || s.clip_delta != 0.0)
        throw ValidationError(std::string(who) + " operates on plain series only");
}

} // namespace

FourierSeries conjugate_coeffs(const FourierSeries& s) {
    require_plain(s, "conjugate_coeffs");
    FourierSeries out = s;
    out.a0 = 0.0;
    for (int n = 0; n < s.order; ++n) {
        out.a[n] = -s.b[n];
        out.b[n] = s.a[n];
    }
    out.cosine_only = false;
    return out;
}

FourierSeries dilate_coeffs(const FourierSeries& s, int num, int den) {
    require_plain(s, "dilate_coeffs");
    if (num == 2 && den == 1) {
        FourierSeries out = s;
        out.order = 2 * s.order;
        out.a.assign(out.order, 0.0);
        out.b.assign(out.order, 0.0);
        for (int n = 1; n <= s.order; ++n) {
            out.a[2 * n - 1] = s.a[n - 1];
            out.b[2 * n - 1] = s.b[n - 1];
        }
        return out;
    }
    if (num == 1 && den == 2) {
        FourierSeries out = s;
        out.order = s.order / 2;
        out.a.assign(out.order, 0.0);
        out.b.assign(out.order, 0.0);
        for (int n = 1; n <= s.order; ++n) {
            if (n % 2 == 0) {
                out.a[n / 2 - 1] = s.a[n - 1];
                out.b[n / 2 - 1] = s.b[n - 1];
            } else if (s.a[n - 1] != 0.0 || s.b[n - 1] != 0.0) {
                throw ValidationError("half dilation needs vanishing odd harmonics");
            }
        }
        return out;
    }
    throw ValidationError("dilation factor must be 2 or 1/2");
}

void export_series_csv(const FourierSeries& s, std::ostream& out) {
    out << "kappa=" << fmt17(s.kappa) << " split=" << (s.split ? 1 : 0) << " a0=" << fmt17(s.a0);
    if (s.cosine_only) out << " even=1";
    if (s.moment_warning) out << " warn=1";
    if (s.clip_delta > 0.0) {
        out << " clip=" << fmt17(s.clip_delta) << " clip_lo=" << fmt17(s.clip_lo)
            << " clip_hi=" << fmt17(s.clip_hi);
    }
    if (s.source && (s.clip_delta > 0.0)) out << " dist=" << s.source->spec_string();
    out << "\n";
    for (int n = 1; n <= s.order; ++n) {
        double an = s.a[n - 1], bn = s.b[n - 1];
        if (s.split) bn -= s.kappa / (kPi * n); // fold the ramp back in
        out << n << ',' << fmt17(an) << ',' << fmt17(bn) << "\n";
    }
}

FourierSeries import_series_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("empty series file");

    FourierSeries s;
    std::string dist_spec;
    const auto dist_pos = header.find("dist=");
    if (dist_pos != std::string::npos) {
        dist_spec = header.substr(dist_pos + 5);
        header = header.substr(0, dist_pos);
    }
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ValidationError("malformed series header token: " + tok);
        const std::string key = tok.substr(0, eq);
        const double val = std::stod(tok.substr(eq + 1));
        if (key == "kappa")
            s.kappa = val;
        else if (key == "split")
            s.split = val != 0.0;
        else if (key == "a0")
            s.a0 = val;
        else if (key == "even")
            s.cosine_only = val != 0.0;
        else if (key == "warn")
            s.moment_warning = val != 0.0;
        else if (key == "clip")
            s.clip_delta = val;
        else if (key == "clip_lo")
            s.clip_lo = val;
        else if (key == "clip_hi")
            s.clip_hi = val;
        else
            throw ValidationError("unknown series header key: " + key);
    }
    if (!dist_spec.empty()) s.source = std::make_shared<Distribution>(Distribution::parse(dist_spec));

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string ns, as, bs;
        if (!std::getline(ls, ns, ',') || !std::getline(ls, as, ',') || !std::getline(ls, bs))
            throw ValidationError("malformed series row: " + line);
        const int n = std::stoi(ns);
        if (n != static_cast<int>(s.a.size()) + 1) throw ValidationError("series rows out of order");
        double an = std::stod(as), bn = std::stod(bs);
        if (s.split) bn += s.kappa / (kPi * n);
        s.a.push_back(an);
        s.b.push_back(bn);
    }
    s.order = static_cast<int>(s.a.size());
    if (s.order < 1) throw ValidationError("series file has no coefficient rows");
    return s;
}

} // namespace cskor
