#include "cskor/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "cskor/rng.hpp"

namespace cskor {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Asymptotic Kolmogorov distribution Q(lambda) = P(D > d), via the two
// complementary series (Marsaglia's switch point).
double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        const double x = std::exp(-kPi * kPi / (8.0 * lambda * lambda));
        double s = 0.0;
        for (int k = 1; k <= 19; k += 2) s += std::pow(x, k * k);
        return std::clamp(1.0 - std::sqrt(kTwoPi) / lambda * s, 0.0, 1.0);
    }
    double s = 0.0;
    for (int k = 1; k <= 12; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += (k % 2 == 1 ? term : -term);
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

} // namespace

ExitRecord simulate_exit(const DomainOracle& oracle, std::pair<double, double> start,
                         std::uint64_t seed, std::uint64_t path_index, const SimConfig& cfg) {
    if (cfg.dt_max > 1e-3 || cfg.dt_max <= 0.0)
        throw ValidationError("dt_max must lie in (0, 1e-3]");

    double x = start.first, y = start.second;
    {
        const DomainProbe p0 = oracle.probe(x, y);
        if (p0.region != Region::Inside) throw ValidationError("start point is not inside the domain");
    }

    PhiloxStream rng(seed, path_index);
    ExitRecord rec;
    rec.path_index = path_index;
    double t = 0.0;
    std::uint64_t steps = 0;

    // One geometry probe per step: the candidate's probe doubles as the
    // state probe of the next iteration.
    DomainProbe p = oracle.probe(x, y);
    while (true) {
        if (p.gap < cfg.absorb_dist) {
            const auto [bx, by] = oracle.project(x, y);
            rec.x = bx;
            rec.y = by;
            rec.tau = t;
            rec.steps = steps;
            return rec;
        }
        if (cfg.time_cap > 0.0 && t >= cfg.time_cap) {
            rec.x = x;
            rec.y = y;
            rec.tau = t;
            rec.steps = steps;
            rec.censored = true;
            return rec;
        }
        double dt = std::min(cfg.dt_max, cfg.step_factor * p.scale * p.scale);
        dt = std::max(dt, 1e-14);
        const double s = std::sqrt(dt);
        const double dx = s * rng.next_normal();
        const double dy = s * rng.next_normal();

        if (++steps > cfg.max_steps) throw NumericError("runaway path: step cap exceeded");

        const double nx = x + dx, ny = y + dy;
        const DomainProbe q = oracle.probe(nx, ny);
        if (q.region == Region::Inside) {
            x = nx;
            y = ny;
            t += dt;
            p = q;
            continue;
        }

        // Bisect the crossing segment; the inside endpoint converges onto
        // the boundary, then lands exactly on it via projection.
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (oracle.region(x + mid * dx, y + mid * dy) == Region::Inside)
                lo = mid;
            else
                hi = mid;
        }
        const auto [bx, by] = oracle.project(x + lo * dx, y + lo * dy);
        rec.x = bx;
        rec.y = by;
        rec.tau = t + 0.5 * (lo + hi) * dt;
        rec.steps = steps;
        return rec;
    }
}

std::vector<ExitRecord> simulate_many(const DomainOracle& oracle, std::pair<double, double> start,
                                      int n_paths, std::uint64_t seed, const SimConfig& cfg,
                                      int threads) {
    if (n_paths < 1) throw ValidationError("need at least one path");
    if (threads <= 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<int>(threads, n_paths);

    std::vector<ExitRecord> records(n_paths);
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&]() {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n_paths) return;
            try {
                records[i] = simulate_exit(oracle, start, seed, static_cast<std::uint64_t>(i), cfg);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_paths);
                return;
            }
        }
    };

    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return records;
}

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw ValidationError("KS test needs a nonempty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, f - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - f);
    }
    KsResult r;
    r.stat = d;
    if (samples.size() >= 8) {
        const double sq = std::sqrt(n);
        r.p_value = kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
    } else {
        r.p_value = kNaN;
    }
    return r;
}

namespace {

// Weighted least squares of z against the given column set; returns the
// coefficients. Plain normal equations, adequate for 2-3 columns.
std::vector<double> wls(const std::vector<std::vector<double>>& cols,
                        const std::vector<double>& z, const std::vector<double>& w) {
    const std::size_t k = cols.size(), n = z.size();
    std::vector<double> ata(k * k, 0.0), atz(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            atz[a] += w[i] * cols[a][i] * z[i];
            for (std::size_t b = 0; b < k; ++b) ata[a * k + b] += w[i] * cols[a][i] * cols[b][i];
        }
    }
    // Gaussian elimination with partial pivoting.
    std::vector<double> m = ata, rhs = atz;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < k; ++r)
            if (std::fabs(m[r * k + c]) > std::fabs(m[piv * k + c])) piv = r;
        if (std::fabs(m[piv * k + c]) < 1e-300) throw NumericError("degenerate rate window");
        if (piv != c) {
            for (std::size_t j = 0; j < k; ++j) std::swap(m[c * k + j], m[piv * k + j]);
            std::swap(rhs[c], rhs[piv]);
        }
        for (std::size_t r = c + 1; r < k; ++r) {
            const double f = m[r * k + c] / m[c * k + c];
            for (std::size_t j = c; j < k; ++j) m[r * k + j] -= f * m[c * k + j];
            rhs[r] -= f * rhs[c];
        }
    }
    std::vector<double> beta(k);
    for (std::size_t c = k; c-- > 0;) {
        double v = rhs[c];
        for (std::size_t j = c + 1; j < k; ++j) v -= m[c * k + j] * beta[j];
        beta[c] = v / m[c * k + c];
    }
    return beta;
}

} // namespace

RateFit estimate_rate(std::span<const std::pair<double, double>> survival) {
    for (std::size_t i = 1; i < survival.size(); ++i) {
        if (survival[i].first <= survival[i - 1].first)
            throw ValidationError("survival grid must be increasing in t");
        if (survival[i].second > survival[i - 1].second + 1e-12)
            throw ValidationError("survival curve must be nonincreasing");
    }

    // Window of usable survival levels. Domains that are open upward decay
    // like C t^-beta e^{-lambda t} (a floor only slows the vertical
    // escape polynomially), so the fit carries an explicit ln t term;
    // clean exponentials come back with beta = 0 untouched.
    std::vector<double> t, z, w;
    for (const auto& [ti, pi] : survival) {
        if (pi >= 0.002 && pi <= 0.2 && ti > 0.0) {
            t.push_back(ti);
            z.push_back(-std::log(pi));
            w.push_back(pi / (1.0 - pi)); // inverse variance of ln P-hat up to 1/n
        }
    }
    if (t.size() < 5) throw NumericError("no exponential regime detected");

    std::vector<double> lt(t.size()), ones(t.size(), 1.0);
    for (std::size_t i = 0; i < t.size(); ++i) lt[i] = std::log(t[i]);

    std::vector<double> coef = wls({t, lt, ones}, z, w);
    if (coef[1] < 0.0) {
        const std::vector<double> lin = wls({t, ones}, z, w);
        coef = {lin[0], 0.0, lin[1]};
    }

    double ss_res = 0.0, ss_tot = 0.0, zbar = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        zbar += w[i] * z[i];
        wsum += w[i];
    }
    zbar /= wsum;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double fitv = coef[0] * t[i] + coef[1] * lt[i] + coef[2];
        ss_res += w[i] * (z[i] - fitv) * (z[i] - fitv);
        ss_tot += w[i] * (z[i] - zbar) * (z[i] - zbar);
    }

    RateFit fit;
    fit.lambda = coef[0];
    fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.window_lo = t.front();
    fit.window_hi = t.back();
    fit.points = static_cast<int>(t.size());
    return fit;
}

double minimal_rate(double alpha, double beta) {
    if (!(alpha < beta)) throw ValidationError("support interval must satisfy alpha < beta");
    if (!std::isfinite(alpha) || !std::isfinite(beta)) return 0.0;
    const double w = beta - alpha;
    return kPi * kPi / (2.0 * w * w);
}

VerificationReport run_verification(const Distribution& d, const DomainOracle& oracle,
                                    int n_paths, const VerifyConfig& cfg) {
    VerificationReport rep;
    rep.n_paths = n_paths;
    rep.seed = cfg.seed;
    rep.dt_max = cfg.sim.dt_max;

    const std::vector<ExitRecord> records =
        simulate_many(oracle, {0.0, 0.0}, n_paths, cfg.seed, cfg.sim, cfg.threads);

    std::vector<double> xs, taus;
    xs.reserve(records.size());
    taus.reserve(records.size());
    double mean_x = 0.0;
    for (const ExitRecord& r : records) {
        if (r.censored) continue;
        xs.push_back(r.x);
        taus.push_back(r.tau);
        mean_x += r.x;
    }
    if (xs.empty()) throw NumericError("all paths were censored");
    rep.mean_exit_x = mean_x / static_cast<double>(xs.size());
    rep.exit_x = xs;

    const KsResult ks = ks_test(xs, [&d](double v) { return d.cdf(v); });
    rep.ks_stat = ks.stat;
    rep.ks_p_value = ks.p_value;

    for (double p : cfg.p_list) {
        double acc = 0.0;
        for (double tau : taus) acc += std::pow(tau, 0.5 * p);
        rep.moment_estimates.emplace_back(p, acc / static_cast<double>(taus.size()));
    }

    // Survival curve on a log-spaced grid between the median and the max.
    std::vector<double> sorted_tau = taus;
    std::sort(sorted_tau.begin(), sorted_tau.end());
    const double t_med = sorted_tau[sorted_tau.size() / 2];
    const double t_max = sorted_tau.back();
    if (t_max > t_med && t_med > 0.0) {
        const int pts = std::max(8, cfg.survival_points);
        const double lo = std::log(t_med), hi = std::log(t_max * 0.999);
        for (int i = 0; i < pts; ++i) {
            const double t = std::exp(lo + (hi - lo) * i / (pts - 1));
            const auto it = std::upper_bound(sorted_tau.begin(), sorted_tau.end(), t);
            const double surv =
                static_cast<double>(sorted_tau.end() - it) / static_cast<double>(sorted_tau.size());
            if (rep.survival.empty() || t > rep.survival.back().first)
                rep.survival.emplace_back(t, surv);
        }
    }
    try {
        rep.rate_fit = estimate_rate(rep.survival);
        rep.rate_detected = true;
    } catch (const NumericError&) {
        rep.rate_detected = false;
    }

    const auto [alpha, beta] = d.support();
    rep.formula_rate = (std::isfinite(alpha) && std::isfinite(beta)) ? minimal_rate(alpha, beta) : 0.0;
    return rep;
}

std::vector<double> consistency_sample(const AnalyticMap& m, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("need at least one sample");
    if (!m.series.source) throw ValidationError("consistency sampling needs a source law");
    const Distribution& d = *m.series.source;
    PhiloxStream rng(seed, 0);
    std::vector<double> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(d.quantile(rng.next_uniform()));
    return out;
}

std::string report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["n_paths"] = r.n_paths;
    j["seed"] = r.seed;
    j["dt_max"] = r.dt_max;
    j["ks_stat"] = r.ks_stat;
    j["ks_p_value"] = r.ks_p_value;
    j["mean_exit_x"] = r.mean_exit_x;
    nlohmann::ordered_json moments = nlohmann::ordered_json::array();
    for (const auto& [p, v] : r.moment_estimates) moments.push_back({{"p", p}, {"estimate", v}});
    j["moment_estimates"] = moments;
    j["rate_detected"] = r.rate_detected;
    if (r.rate_detected) {
        j["rate_fit"] = {{"lambda", r.rate_fit.lambda},
                         {"r_squared", r.rate_fit.r_squared},
                         {"window", {r.rate_fit.window_lo, r.rate_fit.window_hi}},
                         {"points", r.rate_fit.points}};
    }
    j["formula_rate"] = r.formula_rate;
    nlohmann::ordered_json surv = nlohmann::ordered_json::array();
    for (const auto& [t, p] : r.survival) surv.push_back({t, p});
    j["survival"] = surv;
    return j.dump(2);
}

} // namespace cskor
