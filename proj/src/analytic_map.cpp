#include "cskor/analytic_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace cskor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEvalMargin = 1e-9;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::complex<double>> coeffs_from_series(const FourierSeries& s) {
    std::vector<std::complex<double>> c(s.order);
    for (int n = 0; n < s.order; ++n) c[n] = {s.a[n], -s.b[n]};
    return c;
}

double gross_boundary_x(const Distribution& d, double theta) {
    // Even extension: the quantile argument is |theta'|/pi with theta'
    // the angle folded into (-pi, pi].
    const double u = std::min(theta, kTwoPi - theta) / kPi;
    const auto [alpha, beta] = d.support();
    if (u <= 0.0) return alpha;
    if (u >= 1.0) return beta;
    return d.quantile(u);
}

struct Pt {
    double x, y;
};

inline double orient(const Pt& a, const Pt& b, const Pt& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

bool proper_crossing(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    const double o1 = orient(a, b, c), o2 = orient(a, b, d);
    const double o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0)) &&
           ((o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0));
}

} // namespace

const char* variant_name(MapVariant v) {
    switch (v) {
        case MapVariant::DeltaInfinity: return "delta_infinity";
        case MapVariant::Gross: return "gross";
        case MapVariant::FormalCauchy: return "formal_cauchy";
    }
    return "?";
}

MapVariant variant_from_name(const std::string& name) {
    if (name == "delta_infinity") return MapVariant::DeltaInfinity;
    if (name == "gross") return MapVariant::Gross;
    if (name == "formal_cauchy") return MapVariant::FormalCauchy;
    throw ValidationError("unknown map variant: " + name);
}

AnalyticMap map_from_series(FourierSeries series, MapVariant variant) {
    AnalyticMap m;
    m.variant = variant;
    m.order = series.order;
    m.coeff = coeffs_from_series(series);
    m.log_weight = series.split ? series.kappa : 0.0;
    m.series = std::move(series);
    return m;
}

AnalyticMap build_map(const Distribution& d, int order, MapVariant variant, CoeffMode mode,
                      int samples) {
    if (order < 1) throw ValidationError("order must be at least 1");
    if (samples <= 0) samples = 8 * order;

    if (variant == MapVariant::FormalCauchy) {
        if (d.kind() != DistKind::Cauchy)
            throw ValidationError("the formal variant applies to the Cauchy law only");
        FourierSeries s;
        s.order = order;
        s.a.assign(order, 0.0);
        s.b.assign(order, -2.0); // c_n = 2i
        s.moment_warning = true;
        s.source = std::make_shared<Distribution>(d);
        return map_from_series(std::move(s), variant);
    }

    if (!d.nondegenerate()) throw DegenerateError();

    FourierSeries s = (variant == MapVariant::Gross) ? gross_coeffs(d, order, samples)
                                                     : fourier_coeffs(d, order, samples, mode);
    return map_from_series(std::move(s), variant);
}

std::complex<double> eval_map(const AnalyticMap& m, std::complex<double> z) {
    if (std::abs(z) > 1.0 - kEvalMargin)
        throw ValidationError("|z| too close to 1; boundary values go through boundary_point");

    if (m.variant == MapVariant::FormalCauchy) {
        return 2.0 * std::complex<double>(0.0, 1.0) * z / (1.0 - z);
    }

    std::complex<double> sum{0.0, 0.0};
    for (int n = m.order - 1; n >= 0; --n) sum = sum * z + m.coeff[n];
    std::complex<double> value = sum * z + m.c0;
    if (m.log_weight != 0.0)
        value -= std::complex<double>(0.0, m.log_weight / kPi) * std::log(1.0 - z);
    if (m.series.clip_delta > 0.0 && !m.series.cosine_only)
        value += sliver_schwarz(m.series, z);
    return value;
}

BoundaryPoint boundary_point(const AnalyticMap& m, double theta) {
    if (!(theta > 0.0 && theta < kTwoPi)) throw ValidationError("theta must lie in (0, 2*pi)");

    if (m.variant == MapVariant::FormalCauchy) {
        // 2i e^{it}/(1-e^{it}) = -cot(t/2) - i exactly.
        return {-1.0 / std::tan(0.5 * theta), -1.0};
    }

    BoundaryPoint p;
    if (m.series.source) {
        const Distribution& d = *m.series.source;
        p.x = (m.variant == MapVariant::Gross) ? gross_boundary_x(d, theta)
                                               : d.quantile(theta / kTwoPi);
    } else {
        p.x = partial_sum(m.series, theta); // synthetic map: truncated series
    }
    p.y = conjugate_series(m.series, theta);
    return p;
}

InjectivityDiagnostic injectivity_check(const AnalyticMap& m, int grid) {
    if (grid < 256) throw ValidationError("injectivity grid must be at least 256");

    std::vector<Pt> pts;
    pts.reserve(grid);
    double violation = 0.0;
    double prev_x = -kInf;
    for (int k = 0; k < grid; ++k) {
        const double theta = kTwoPi * (k + 0.5) / grid;
        const BoundaryPoint bp = boundary_point(m, theta);
        if (m.variant != MapVariant::Gross) violation = std::max(violation, prev_x - bp.x);
        prev_x = bp.x;
        if (std::isfinite(bp.y)) pts.push_back({bp.x, bp.y});
    }

    int crossings = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t j = i + 2; j + 1 < n; ++j) {
            if (proper_crossing(pts[i], pts[i + 1], pts[j], pts[j + 1])) ++crossings;
        }
    }

    InjectivityDiagnostic diag;
    diag.monotone_violation = std::max(0.0, violation);
    diag.self_intersections = crossings;
    if (crossings > 0 || diag.monotone_violation > 1e-6)
        diag.verdict = InjectivityDiagnostic::Verdict::Fail;
    else if (diag.monotone_violation > 1e-9)
        diag.verdict = InjectivityDiagnostic::Verdict::Warn;
    else
        diag.verdict = InjectivityDiagnostic::Verdict::Pass;
    return diag;
}

std::vector<SlitTip> slit_tips(const Distribution& d, int order) {
    if (d.kind() != DistKind::Atomic && d.kind() != DistKind::Empirical)
        throw ValidationError("slit tips are defined for atomic laws");
    if (!d.nondegenerate()) throw DegenerateError();

    const auto& atoms = d.atoms();
    std::vector<SlitTip> tips;
    if (atoms.size() <= 2) return tips; // pure strip

    const FourierSeries s = fourier_coeffs(d, order, 8 * order, CoeffMode::Auto);

    double cum = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const double arc_lo = kTwoPi * cum;
        cum += atoms[k].weight;
        const double arc_hi = kTwoPi * std::min(cum, 1.0);
        if (k == 0 || k + 1 == atoms.size()) continue; // strip walls

        // Dense scan of the arc, then golden-section refinement. The
        // conjugate rises from -inf to the tip and falls back, so the
        // maximum is interior.
        const int scan = 512;
        double best_theta = 0.5 * (arc_lo + arc_hi), best_y = -kInf;
        for (int i = 0; i < scan; ++i) {
            const double theta = arc_lo + (arc_hi - arc_lo) * (i + 0.5) / scan;
            const double y = conjugate_series(s, theta);
            if (y > best_y) {
                best_y = y;
                best_theta = theta;
            }
        }
        const double h = (arc_hi - arc_lo) / scan;
        double lo = std::max(arc_lo, best_theta - h), hi = std::min(arc_hi, best_theta + h);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = conjugate_series(s, x1), f2 = conjugate_series(s, x2);
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = conjugate_series(s, x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = conjugate_series(s, x1);
            }
        }
        tips.push_back({atoms[k].location, std::max(f1, f2)});
    }
    return tips;
}

std::complex<double> schwarz_eval(const std::function<double(double)>& boundary_real,
                                  std::complex<double> z, int quad_points) {
    if (std::abs(z) > 0.9) throw ValidationError("schwarz_eval requires |z| <= 0.9");
    if (quad_points < 1024) throw ValidationError("schwarz_eval needs at least 1024 points");

    auto eval = [&boundary_real, z](int M) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < M; ++j) {
            const double t = kTwoPi * (j + 0.5) / M;
            const std::complex<double> e{std::cos(t), std::sin(t)};
            acc += (e + z) / (e - z) * boundary_real(t);
        }
        return acc / static_cast<double>(M);
    };
    const std::complex<double> coarse = eval(quad_points);
    const std::complex<double> fine = eval(2 * quad_points);
    if (std::abs(fine - coarse) > 1e-6)
        throw NumericError("Schwarz quadrature did not converge under doubling");
    return fine;
}

std::vector<double> hardy_profile(const AnalyticMap& m, double p, std::span<const double> r_grid,
                                  bool* nondecreasing) {
    if (!(p > 1.0)) throw ValidationError("Hardy index p must exceed 1");
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        if (r_grid[i] < 0.0 || r_grid[i] >= 1.0 || (i > 0 && r_grid[i] <= r_grid[i - 1]))
            throw ValidationError("r grid must be strictly increasing within [0,1)");
    }

    std::vector<double> profile;
    profile.reserve(r_grid.size());
    for (double r : r_grid) {
        // The integrand peaks on a scale ~(1-r) near a boundary
        // singularity; sample accordingly.
        int M = 2048;
        if (r > 0.97) M = static_cast<int>(std::min(6.4e7, 64.0 / (1.0 - r)));
        double acc = 0.0;
        for (int j = 0; j < M; ++j) {
            const double t = kTwoPi * (j + 0.5) / M;
            const std::complex<double> z = r * std::complex<double>(std::cos(t), std::sin(t));
            acc += std::pow(std::abs(eval_map(m, z)), p);
        }
        profile.push_back(std::pow(acc / M, 1.0 / p));
    }
    if (nondecreasing) {
        bool ok = true;
        for (std::size_t i = 1; i < profile.size(); ++i)
            if (profile[i] < profile[i - 1] - 1e-10 * (1.0 + profile[i - 1])) ok = false;
        *nondecreasing = ok;
    }
    return profile;
}

void export_map_csv(const AnalyticMap& m, std::ostream& out) {
    out << "log_weight=" << fmt17(m.log_weight) << " c0=" << fmt17(m.c0.real()) << ','
        << fmt17(m.c0.imag()) << " variant=" << variant_name(m.variant)
        << " a0=" << fmt17(m.series.a0);
    if (m.series.cosine_only) out << " even=1";
    if (m.series.moment_warning) out << " warn=1";
    if (m.series.clip_delta > 0.0) {
        out << " clip=" << fmt17(m.series.clip_delta) << " clip_lo=" << fmt17(m.series.clip_lo)
            << " clip_hi=" << fmt17(m.series.clip_hi);
    }
    if (m.series.source && m.series.source->kind() != DistKind::Custom)
        out << " dist=" << m.series.source->spec_string();
    out << "\n";
    for (int n = 1; n <= m.order; ++n) {
        std::complex<double> c = m.coeff[n - 1];
        if (m.log_weight != 0.0) c += std::complex<double>(0.0, m.log_weight / (kPi * n));
        out << n << ',' << fmt17(c.real()) << ',' << fmt17(c.imag()) << "\n";
    }
}

AnalyticMap import_map_csv(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw ValidationError("empty map file");

    std::string dist_spec;
    const auto dist_pos = header.find("dist=");
    if (dist_pos != std::string::npos) {
        dist_spec = header.substr(dist_pos + 5);
        header = header.substr(0, dist_pos);
    }

    FourierSeries s;
    MapVariant variant = MapVariant::DeltaInfinity;
    double log_weight = 0.0;
    std::complex<double> c0{0.0, 0.0};
    std::istringstream hs(header);
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ValidationError("malformed map header token: " + tok);
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        if (key == "log_weight")
            log_weight = std::stod(val);
        else if (key == "c0") {
            const auto comma = val.find(',');
            if (comma == std::string::npos) throw ValidationError("malformed c0 value");
            c0 = {std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1))};
        } else if (key == "variant")
            variant = variant_from_name(val);
        else if (key == "a0")
            s.a0 = std::stod(val);
        else if (key == "even")
            s.cosine_only = std::stod(val) != 0.0;
        else if (key == "warn")
            s.moment_warning = std::stod(val) != 0.0;
        else if (key == "clip")
            s.clip_delta = std::stod(val);
        else if (key == "clip_lo")
            s.clip_lo = std::stod(val);
        else if (key == "clip_hi")
            s.clip_hi = std::stod(val);
        else
            throw ValidationError("unknown map header key: " + key);
    }
    if (!dist_spec.empty()) s.source = std::make_shared<Distribution>(Distribution::parse(dist_spec));

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string ns, res, ims;
        if (!std::getline(ls, ns, ',') || !std::getline(ls, res, ',') || !std::getline(ls, ims))
            throw ValidationError("malformed map row: " + line);
        const int n = std::stoi(ns);
        if (n != static_cast<int>(s.a.size()) + 1) throw ValidationError("map rows out of order");
        double re = std::stod(res), im = std::stod(ims);
        if (log_weight != 0.0) im -= log_weight / (kPi * n);
        s.a.push_back(re);
        s.b.push_back(-im);
    }
    s.order = static_cast<int>(s.a.size());
    if (s.order < 1) throw ValidationError("map file has no coefficient rows");
    s.split = log_weight != 0.0;
    s.kappa = log_weight;

    AnalyticMap m = map_from_series(std::move(s), variant);
    m.c0 = c0;
    return m;
}

} // namespace cskor
