#include "cskor/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "cskor/quadrature.hpp"

namespace cskor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Hyperbolic secant quantile, computed from the small half to avoid
// catastrophic loss near u -> 1.
double hypsech_quantile(double u) {
    if (u > 0.5) return (2.0 / kPi) * std::log(1.0 / std::tan(0.5 * kPi * (1.0 - u)));
    return (2.0 / kPi) * std::log(std::tan(0.5 * kPi * u));
}

} // namespace

double invert_monotone_cdf(const std::function<double(double)>& cdf, double u, double lo,
                           double hi, const std::function<double(double)>& density) {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile argument must lie in (0,1)");

    // Expand infinite endpoints to a finite bracket.
    double a = std::isfinite(lo) ? lo : -1.0;
    double b = std::isfinite(hi) ? hi : 1.0;
    if (!std::isfinite(lo)) {
        double step = 1.0;
        while (cdf(a) > u) {
            a -= step;
            step *= 2.0;
            if (a < -1e300) break;
        }
    }
    if (!std::isfinite(hi)) {
        double step = 1.0;
        while (cdf(b) < u) {
            b += step;
            step *= 2.0;
            if (b > 1e300) break;
        }
    }
    if (a > b) std::swap(a, b);

    double x = 0.5 * (a + b);
    for (int it = 0; it < 200; ++it) {
        const double fx = cdf(x) - u;
        if (fx > 0.0)
            b = x;
        else
            a = x;

        double next = 0.5 * (a + b);
        if (density) {
            const double dphi = density(x);
            if (dphi > 1e-300) {
                const double newton = x - fx / dphi;
                if (newton > a && newton < b) next = newton;
            }
        }
        const double tol = 1e-12 * (1.0 + std::fabs(x));
        if (std::fabs(next - x) <= tol && std::fabs(b - a) <= 4.0 * tol) return next;
        x = next;
    }
    return x;
}

Distribution Distribution::uniform(double a, double b) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
        throw ValidationError("uniform requires finite a < b");
    Distribution d;
    d.kind_ = DistKind::Uniform;
    d.p1_ = a;
    d.p2_ = b;
    return d;
}

Distribution Distribution::arcsine() {
    Distribution d;
    d.kind_ = DistKind::Arcsine;
    return d;
}

Distribution Distribution::hypsech() {
    Distribution d;
    d.kind_ = DistKind::HypSech;
    return d;
}

Distribution Distribution::gaussian(double mean, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(mean) || !std::isfinite(sigma))
        throw ValidationError("gaussian requires finite mean and sigma > 0");
    Distribution d;
    d.kind_ = DistKind::Gaussian;
    d.p1_ = mean;
    d.p2_ = sigma;
    return d;
}

Distribution Distribution::cauchy() {
    Distribution d;
    d.kind_ = DistKind::Cauchy;
    return d;
}

Distribution Distribution::atomic(std::vector<Atom> atoms) {
    if (atoms.empty()) throw ValidationError("atomic law needs at least one atom");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.location < y.location; });
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (!(atoms[i].weight > 0.0) || atoms[i].weight > 1.0)
            throw ValidationError("atom weights must lie in (0,1]");
        if (!std::isfinite(atoms[i].location)) throw ValidationError("atom locations must be finite");
        if (i > 0 && !(atoms[i].location > atoms[i - 1].location))
            throw ValidationError("atom locations must be strictly increasing");
        total += atoms[i].weight;
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ValidationError("atom weights must sum to 1");

    Distribution d;
    d.kind_ = DistKind::Atomic;
    d.atoms_ = std::move(atoms);
    d.cum_.resize(d.atoms_.size());
    double c = 0.0;
    for (std::size_t i = 0; i < d.atoms_.size(); ++i) {
        c += d.atoms_[i].weight;
        d.cum_[i] = c;
    }
    d.cum_.back() = 1.0;
    return d;
}

Distribution Distribution::from_samples(std::span<const double> values) {
    if (values.size() < 2) throw ValidationError("need at least 2 sample values");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) throw DegenerateError("degenerate sample: all values equal");

    std::vector<Atom> atoms;
    const double w = 1.0 / static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        atoms.push_back({sorted[i], w * static_cast<double>(j - i)});
        i = j;
    }
    Distribution d = atomic(std::move(atoms));
    d.kind_ = DistKind::Empirical;
    return d;
}

Distribution Distribution::custom(std::string label, std::function<double(double)> cdf,
                                  double alpha, double beta,
                                  std::function<double(double)> density) {
    if (!cdf) throw ValidationError("custom law requires a cdf");
    if (!(alpha < beta)) throw ValidationError("custom support must satisfy alpha < beta");
    Distribution d;
    d.kind_ = DistKind::Custom;
    d.label_ = std::move(label);
    d.custom_cdf_ = std::move(cdf);
    d.custom_density_ = std::move(density);
    d.custom_alpha_ = alpha;
    d.custom_beta_ = beta;
    return d;
}

double Distribution::cdf(double x) const {
    switch (kind_) {
        case DistKind::Uniform: {
            if (x <= p1_) return 0.0;
            if (x >= p2_) return 1.0;
            return (x - p1_) / (p2_ - p1_);
        }
        case DistKind::Arcsine: {
            if (x <= -1.0) return 0.0;
            if (x >= 1.0) return 1.0;
            return std::acos(-x) / kPi;
        }
        case DistKind::HypSech:
            return (2.0 / kPi) * std::atan(std::exp(0.5 * kPi * x));
        case DistKind::Gaussian:
            return 0.5 * std::erfc(-(x - p1_) / (p2_ * std::numbers::sqrt2));
        case DistKind::Cauchy:
            return 0.5 + std::atan(x) / kPi;
        case DistKind::Atomic:
        case DistKind::Empirical: {
            double c = 0.0;
            for (std::size_t i = 0; i < atoms_.size() && atoms_[i].location <= x; ++i) c = cum_[i];
            return c;
        }
        case DistKind::Custom: {
            const double v = custom_cdf_(x + shift_);
            return std::clamp(v, 0.0, 1.0);
        }
    }
    return 0.0;
}

double Distribution::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw ValidationError("quantile argument must lie in (0,1)");
    switch (kind_) {
        case DistKind::Uniform:
            return p1_ + u * (p2_ - p1_);
        case DistKind::Arcsine:
            return -std::cos(kPi * u);
        case DistKind::HypSech:
            return hypsech_quantile(u);
        case DistKind::Gaussian: {
            auto F = [this](double x) { return cdf(x); };
            auto f = [this](double x) { return *density(x); };
            return invert_monotone_cdf(F, u, p1_ - 42.0 * p2_, p1_ + 42.0 * p2_, f);
        }
        case DistKind::Cauchy: {
            // -cot(pi u), stable near both endpoints.
            if (u == 0.5) return 0.0;
            return -std::cos(kPi * u) / std::sin(kPi * u);
        }
        case DistKind::Atomic:
        case DistKind::Empirical: {
            // sup{t : F(t) <= u}: first atom whose cumulative weight exceeds u.
            const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
            const std::size_t idx = std::min<std::size_t>(it - cum_.begin(), atoms_.size() - 1);
            return atoms_[idx].location;
        }
        case DistKind::Custom: {
            auto F = [this](double x) { return cdf(x); };
            std::function<double(double)> f;
            if (custom_density_)
                f = [this](double x) { return *density(x); };
            return invert_monotone_cdf(F, u, custom_alpha_ - shift_, custom_beta_ - shift_, f);
        }
    }
    return 0.0;
}

std::optional<double> Distribution::density(double x) const {
    switch (kind_) {
        case DistKind::Uniform:
            return (x < p1_ || x > p2_) ? 0.0 : 1.0 / (p2_ - p1_);
        case DistKind::Arcsine: {
            if (std::fabs(x) >= 1.0) return 0.0;
            return 1.0 / (kPi * std::sqrt(1.0 - x * x));
        }
        case DistKind::HypSech:
            return 0.5 / std::cosh(0.5 * kPi * x);
        case DistKind::Gaussian: {
            const double t = (x - p1_) / p2_;
            return std::exp(-0.5 * t * t) / (p2_ * std::sqrt(2.0 * kPi));
        }
        case DistKind::Cauchy:
            return 1.0 / (kPi * (1.0 + x * x));
        case DistKind::Atomic:
        case DistKind::Empirical:
            return std::nullopt;
        case DistKind::Custom: {
            if (!custom_density_) return std::nullopt;
            return custom_density_(x + shift_);
        }
    }
    return std::nullopt;
}

std::pair<double, double> Distribution::support() const {
    switch (kind_) {
        case DistKind::Uniform:
            return {p1_, p2_};
        case DistKind::Arcsine:
            return {-1.0, 1.0};
        case DistKind::HypSech:
        case DistKind::Gaussian:
        case DistKind::Cauchy:
            return {-kInf, kInf};
        case DistKind::Atomic:
        case DistKind::Empirical:
            return {atoms_.front().location, atoms_.back().location};
        case DistKind::Custom:
            return {custom_alpha_ - shift_, custom_beta_ - shift_};
    }
    return {0.0, 0.0};
}

double Distribution::support_width() const {
    const auto [a, b] = support();
    if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
    return b - a;
}

double Distribution::mean() const {
    if (mean_cached_) return cached_mean_;
    double m = 0.0;
    switch (kind_) {
        case DistKind::Uniform:
            m = 0.5 * (p1_ + p2_);
            break;
        case DistKind::Arcsine:
        case DistKind::HypSech:
            m = 0.0;
            break;
        case DistKind::Gaussian:
            m = p1_;
            break;
        case DistKind::Cauchy:
            m = std::numeric_limits<double>::quiet_NaN();
            break;
        case DistKind::Atomic:
        case DistKind::Empirical: {
            for (const Atom& a : atoms_) m += a.weight * a.location;
            break;
        }
        case DistKind::Custom: {
            // Quantile-space mean with endpoint-compressing substitution
            // u = (1 + tanh v)/2.
            auto g = [this](double v) {
                const double s = 0.5 * (1.0 + std::tanh(v));
                const double du = 0.5 / (std::cosh(v) * std::cosh(v));
                if (s <= 0.0 || s >= 1.0) return 0.0;
                return quantile(s) * du;
            };
            m = integrate(g, -30.0, 30.0, 1e-12, 1e-12).value;
            break;
        }
    }
    cached_mean_ = m;
    mean_cached_ = true;
    return m;
}

bool Distribution::is_centered() const {
    const double m = mean();
    if (!std::isfinite(m)) return false;
    double scale = 1.0;
    if (nondegenerate()) scale += std::fabs(quantile(0.25)) + std::fabs(quantile(0.75));
    return std::fabs(m) <= 1e-9 * scale;
}

bool Distribution::nondegenerate() const {
    switch (kind_) {
        case DistKind::Atomic:
        case DistKind::Empirical:
            return atoms_.size() > 1;
        case DistKind::Custom:
            return quantile(0.01) < quantile(0.99);
        default:
            return true;
    }
}

SupportMoments Distribution::support_and_moments(double p) const {
    if (!(p > 1.0)) throw ValidationError("moment order p must exceed 1");
    SupportMoments out;
    const auto [a, b] = support();
    out.alpha = a;
    out.beta = b;
    out.mean = mean();
    out.nondegenerate = nondegenerate();

    if (!out.nondegenerate) {
        const double loc = atoms_.empty() ? 0.0 : atoms_.front().location;
        out.p_moment = std::pow(std::fabs(loc), p);
        return out;
    }

    if (kind_ == DistKind::Atomic || kind_ == DistKind::Empirical) {
        double s = 0.0;
        for (const Atom& atom : atoms_) s += atom.weight * std::pow(std::fabs(atom.location), p);
        out.p_moment = s;
        return out;
    }

    // E|X|^p = int_0^1 |G(u)|^p du, u = (1 + tanh v)/2. The transformed
    // integrand decays like e^{-2|v|} poly(v) whenever the moment is finite;
    // growing window increments signal divergence.
    auto g = [this, p](double v) {
        const double s = 0.5 * (1.0 + std::tanh(v));
        if (s <= 0.0 || s >= 1.0) return 0.0;
        const double du = 0.5 / (std::cosh(v) * std::cosh(v));
        return std::pow(std::fabs(quantile(s)), p) * du;
    };

    double total = integrate(g, -5.0, 5.0, 1e-13, 1e-12).value;
    double prev_inc = kInf;
    double v0 = 5.0;
    for (int k = 0; k < 8; ++k) {
        const double v1 = v0 + 5.0;
        const double inc = integrate(g, v0, v1, 1e-13, 1e-12).value +
                           integrate(g, -v1, -v0, 1e-13, 1e-12).value;
        total += inc;
        if (inc <= 1e-13 * std::max(1.0, total)) {
            out.p_moment = total;
            return out;
        }
        if (k > 1 && inc > 0.9 * prev_inc) {
            out.p_moment = kInf; // increments not decaying: divergent moment
            return out;
        }
        prev_inc = inc;
        v0 = v1;
    }
    out.p_moment = total;
    return out;
}

Distribution Distribution::centered() const {
    const double m = mean();
    if (!std::isfinite(m)) throw ValidationError("uncenterable: the law has no finite mean");
    if (m == 0.0) return *this;

    Distribution d = *this;
    d.mean_cached_ = false;
    switch (kind_) {
        case DistKind::Uniform:
            d.p1_ -= m;
            d.p2_ -= m;
            break;
        case DistKind::Arcsine:
        case DistKind::HypSech:
            break; // already centered
        case DistKind::Gaussian:
            d.p1_ = 0.0;
            break;
        case DistKind::Cauchy:
            throw ValidationError("uncenterable: the law has no finite mean");
        case DistKind::Atomic:
        case DistKind::Empirical:
            for (Atom& atom : d.atoms_) atom.location -= m;
            break;
        case DistKind::Custom:
            d.shift_ += m;
            break;
    }
    return d;
}

std::string Distribution::spec_string() const {
    switch (kind_) {
        case DistKind::Uniform:
            return "kind=uniform a=" + fmt17(p1_) + " b=" + fmt17(p2_);
        case DistKind::Arcsine:
            return "kind=arcsine";
        case DistKind::HypSech:
            return "kind=hypsech";
        case DistKind::Gaussian:
            return "kind=gaussian mean=" + fmt17(p1_) + " sigma=" + fmt17(p2_);
        case DistKind::Cauchy:
            return "kind=cauchy";
        case DistKind::Atomic:
        case DistKind::Empirical: {
            std::string s = "kind=atomic points=";
            for (std::size_t i = 0; i < atoms_.size(); ++i) {
                if (i) s += ',';
                s += fmt17(atoms_[i].location) + ":" + fmt17(atoms_[i].weight);
            }
            return s;
        }
        case DistKind::Custom:
            return "kind=custom label=" + label_;
    }
    return {};
}

Distribution Distribution::parse(const std::string& text) {
    std::istringstream in(text);
    std::string tok, kind;
    std::vector<std::pair<std::string, std::string>> kv;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ValidationError("malformed distribution token: " + tok);
        kv.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        if (kv.back().first == "kind") kind = kv.back().second;
    }
    auto get = [&kv](const std::string& key) -> const std::string* {
        for (const auto& [k, v] : kv)
            if (k == key) return &v;
        return nullptr;
    };
    auto get_num = [&get](const std::string& key) {
        const std::string* v = get(key);
        if (!v) throw ValidationError("missing distribution parameter: " + key);
        try {
            std::size_t pos = 0;
            const double x = std::stod(*v, &pos);
            if (pos != v->size()) throw std::invalid_argument(*v);
            return x;
        } catch (const std::exception&) {
            throw ValidationError("bad numeric value for " + key + ": " + *v);
        }
    };

    if (kind == "uniform") return uniform(get_num("a"), get_num("b"));
    if (kind == "arcsine") return arcsine();
    if (kind == "hypsech") return hypsech();
    if (kind == "gaussian") {
        const double m = get("mean") ? get_num("mean") : 0.0;
        const double s = get("sigma") ? get_num("sigma") : 1.0;
        return gaussian(m, s);
    }
    if (kind == "cauchy") return cauchy();
    if (kind == "atomic") {
        const std::string* pts = get("points");
        if (!pts) throw ValidationError("atomic law requires points=loc:w,loc:w,...");
        std::vector<Atom> atoms;
        std::istringstream ps(*pts);
        std::string item;
        while (std::getline(ps, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ValidationError("malformed atom (want loc:weight): " + item);
            try {
                atoms.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
            } catch (const std::exception&) {
                throw ValidationError("malformed atom: " + item);
            }
        }
        return atomic(std::move(atoms));
    }
    if (kind == "empirical") {
        const std::string* file = get("file");
        if (!file) throw ValidationError("empirical law requires file=<csv>");
        std::ifstream fs(*file);
        if (!fs) throw ValidationError("cannot open sample file: " + *file);
        std::vector<double> values;
        std::string line;
        while (std::getline(fs, line)) {
            if (line.empty()) continue;
            try {
                values.push_back(std::stod(line));
            } catch (const std::exception&) {
                throw ValidationError("bad sample value: " + line);
            }
        }
        return from_samples(values);
    }
    throw ValidationError("unknown distribution kind: " + (kind.empty() ? "<none>" : kind));
}

} // namespace cskor
