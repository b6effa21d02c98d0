#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cskor/rng.hpp"
#include "cskor/verify.hpp"

using namespace cskor;

namespace {

constexpr double kPi = std::numbers::pi;

DomainOracle strip_oracle() {
    return make_oracle(build_strip_slit(Distribution::atomic({{-1.0, 0.5}, {1.0, 0.5}}), 64));
}

DomainOracle catenary_oracle(int order = 2048, int grid = 2048) {
    const AnalyticMap m =
        build_map(Distribution::uniform(-1, 1), order, MapVariant::DeltaInfinity);
    return make_oracle(build_boundary(m, grid));
}

// Complement of the lower half-strip {|x| <= 1, y <= -1}: a domain whose
// exit law is supported on [-1,1] but whose exit time has no p-th moment
// for p >= 1/4.
DomainOracle halfstrip_complement() {
    auto dist = [](double x, double y) {
        const double ax = std::fabs(x);
        if (y <= -1.0) return ax <= 1.0 ? 0.0 : ax - 1.0;
        if (ax <= 1.0) return y + 1.0;
        return std::hypot(ax - 1.0, y + 1.0);
    };
    DomainOracle o;
    o.region = [dist](double x, double y) {
        if (y < -1.0 && std::fabs(x) < 1.0) return Region::Outside;
        return dist(x, y) <= 1e-9 ? Region::BoundaryBand : Region::Inside;
    };
    o.step_scale = dist;
    o.absorb_gap = dist;
    o.project = [](double x, double y) {
        if (std::fabs(x) <= 1.0 && y > -1.0) return std::pair<double, double>(x, -1.0);
        if (y <= -1.0) return std::pair<double, double>(x > 0 ? 1.0 : -1.0, y);
        return std::pair<double, double>(x > 0 ? 1.0 : -1.0, -1.0);
    };
    o.probe = [dist](double x, double y) {
        DomainProbe p;
        if (y < -1.0 && std::fabs(x) < 1.0) {
            p.region = Region::Outside;
            return p;
        }
        const double d = dist(x, y);
        p.region = d <= 1e-9 ? Region::BoundaryBand : Region::Inside;
        p.gap = p.scale = d;
        return p;
    };
    return o;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("minimal rate formula") {
    CHECK(minimal_rate(-1.0, 1.0) == doctest::Approx(kPi * kPi / 8.0).epsilon(1e-15));
    CHECK(minimal_rate(0.0, kPi) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(minimal_rate(-std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity()) == 0.0);
    CHECK_THROWS_AS(minimal_rate(1.0, -1.0), ValidationError);
}

TEST_CASE("KS statistic and p-value") {
    auto unit_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
    const KsResult one = ks_test({0.5}, unit_cdf);
    CHECK(one.stat == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::isnan(one.p_value)); // below the asymptotic regime
    CHECK_THROWS_AS(ks_test({}, unit_cdf), ValidationError);

    // Self-test: own-law draws rarely reject; a 0.1 shift always does.
    auto cdf11 = [](double x) { return std::clamp(0.5 * (x + 1.0), 0.0, 1.0); };
    int ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        PhiloxStream rng(seed + 1000, 0);
        std::vector<double> draws(10000);
        for (double& v : draws) v = 2.0 * rng.next_uniform() - 1.0;
        if (ks_test(draws, cdf11).p_value > 0.01) ++ok;
    }
    CHECK(ok >= 99);

    PhiloxStream rng(77, 0);
    std::vector<double> shifted(10000);
    for (double& v : shifted) v = 2.0 * rng.next_uniform() - 1.0 + 0.1;
    CHECK(ks_test(shifted, cdf11).p_value < 1e-6);
}

TEST_CASE("rate fit on synthetic exponential data") {
    std::vector<std::pair<double, double>> surv;
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.4 + i * 0.04;
        surv.emplace_back(t, std::exp(-3.0 * t));
    }
    const RateFit fit = estimate_rate(surv);
    CHECK(fit.lambda == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.points >= 5);

    // A polynomial prefactor must not bias the fitted rate: the ln t term
    // absorbs it exactly.
    std::vector<std::pair<double, double>> curved;
    for (int i = 0; i <= 52; ++i) {
        const double t = 0.3 + i * 0.025;
        curved.emplace_back(t, 0.2 * std::exp(-3.0 * t) / std::sqrt(t));
    }
    const RateFit cfit = estimate_rate(curved);
    CHECK(cfit.lambda == doctest::Approx(3.0).epsilon(1e-9));

    std::vector<std::pair<double, double>> flat{{0.1, 0.9}, {0.2, 0.85}, {0.3, 0.8}};
    CHECK_THROWS_AS(estimate_rate(flat), NumericError); // window empty
    std::vector<std::pair<double, double>> rising{{0.1, 0.05}, {0.2, 0.06}, {0.3, 0.04},
                                                  {0.4, 0.03}, {0.5, 0.02}};
    CHECK_THROWS_AS(estimate_rate(rising), ValidationError); // not decreasing
}

TEST_CASE("strip exits are symmetric with unit mean time") {
    const DomainOracle strip = strip_oracle();
    SimConfig cfg;
    cfg.dt_max = 1e-3;
    const auto records = simulate_many(strip, {0.0, 0.0}, 20000, 42, cfg);

    double mean_x = 0.0, mean_tau = 0.0;
    int plus = 0;
    for (const ExitRecord& r : records) {
        mean_x += r.x;
        mean_tau += r.tau;
        if (r.x > 0.0) ++plus;
        CHECK(r.tau > 0.0);
    }
    const double n = static_cast<double>(records.size());
    mean_x /= n;
    mean_tau /= n;
    CHECK(std::fabs(mean_x) < 0.02);
    CHECK(std::fabs(plus / n - 0.5) < 0.012);
    // One-dimensional identity E[tau] = (1-x)(1+x) = 1 at the center.
    CHECK(mean_tau == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("exit records land on the boundary") {
    const DomainOracle strip = strip_oracle();
    const DomainOracle cat = catenary_oracle();
    SimConfig cfg;
    cfg.dt_max = 1e-3;
    for (int i = 0; i < 50; ++i) {
        const ExitRecord rs = simulate_exit(strip, {0.0, 0.0}, 9, i, cfg);
        CHECK(strip_oracle().region(rs.x, rs.y) == Region::BoundaryBand);
        const ExitRecord rc = simulate_exit(cat, {0.0, 0.0}, 9, i, cfg);
        CHECK(cat.region(rc.x, rc.y) == Region::BoundaryBand);
    }
    CHECK_THROWS_AS(simulate_exit(strip, {5.0, 0.0}, 1, 0, cfg), ValidationError);
    SimConfig bad;
    bad.dt_max = 0.1;
    CHECK_THROWS_AS(simulate_exit(strip, {0.0, 0.0}, 1, 0, bad), ValidationError);
}

TEST_CASE("identical seeds reproduce reports byte for byte") {
    const Distribution u = Distribution::uniform(-1, 1);
    const DomainOracle cat = catenary_oracle();
    VerifyConfig cfg;
    cfg.seed = 2718;
    cfg.sim.dt_max = 1e-3;
    cfg.threads = 1;
    const VerificationReport a = run_verification(u, cat, 2000, cfg);
    cfg.threads = 2;
    const VerificationReport b = run_verification(u, cat, 2000, cfg);
    CHECK(report_to_json(a) == report_to_json(b));
    CHECK(a.ks_stat == b.ks_stat);
}

TEST_CASE("catenary verification sanity") {
    const Distribution u = Distribution::uniform(-1, 1);
    const DomainOracle cat = catenary_oracle(4096, 4096);
    VerifyConfig cfg;
    cfg.seed = 31415;
    cfg.sim.dt_max = 2e-4;
    const VerificationReport rep = run_verification(u, cat, 20000, cfg);
    CHECK(std::fabs(rep.mean_exit_x) < 0.02);
    CHECK(rep.ks_p_value > 0.001);
    CHECK(rep.formula_rate == doctest::Approx(kPi * kPi / 8.0));
    CHECK(rep.rate_detected);
    CHECK(rep.rate_fit.lambda == doctest::Approx(kPi * kPi / 8.0).epsilon(0.2));
}

TEST_CASE("symmetric disc domain verifies against the arcsine law") {
    const Distribution a = Distribution::arcsine();
    const AnalyticMap g = build_map(a, 256, MapVariant::Gross);
    const DomainOracle disc = make_oracle(build_boundary(g, 2048));
    VerifyConfig cfg;
    cfg.seed = 1821;
    cfg.sim.dt_max = 1e-3;
    const VerificationReport rep = run_verification(a, disc, 20000, cfg);
    CHECK(std::fabs(rep.mean_exit_x) < 0.02);
    CHECK(rep.ks_p_value > 0.001);
    // Unit-disc identity E[tau] = (1 - |z0|^2)/2 = 1/2 at the center.
    for (const auto& [p, v] : rep.moment_estimates) {
        if (p == 2.0) CHECK(v == doctest::Approx(0.5).epsilon(0.03));
    }
}

TEST_CASE("parabola verification sanity with truncated tails") {
    const Distribution hs = Distribution::hypsech();
    const AnalyticMap m = build_map(hs, 4096, MapVariant::DeltaInfinity);
    const DomainOracle parab = make_oracle(build_boundary(m, 4096));
    VerifyConfig cfg;
    cfg.seed = 60902;
    cfg.sim.dt_max = 5e-4;
    const VerificationReport rep = run_verification(hs, parab, 30000, cfg);
    CHECK(std::fabs(rep.mean_exit_x) < 0.03);
    CHECK(rep.ks_p_value > 0.001);
    CHECK(rep.formula_rate == 0.0); // unbounded support
}

TEST_CASE("halving the step leaves the strip KS statistic within noise") {
    const Distribution two = Distribution::atomic({{-1.0, 0.5}, {1.0, 0.5}});
    const DomainOracle strip = strip_oracle();
    VerifyConfig cfg;
    cfg.seed = 7;
    cfg.sim.dt_max = 1e-3;
    const double d1 = run_verification(two, strip, 20000, cfg).ks_stat;
    cfg.sim.dt_max = 5e-4;
    const double d2 = run_verification(two, strip, 20000, cfg).ks_stat;
    CHECK(std::fabs(d1 - d2) < 1.2 / std::sqrt(20000.0));
}

TEST_CASE("exit-time moments stabilize for catalog domains") {
    const DomainOracle cat = catenary_oracle();
    SimConfig cfg;
    cfg.dt_max = 1e-3;
    auto half_moment = [&](int n, std::uint64_t seed) {
        const auto records = simulate_many(cat, {0.0, 0.0}, n, seed, cfg);
        double acc = 0.0;
        for (const ExitRecord& r : records) acc += std::sqrt(r.tau);
        return acc / static_cast<double>(n);
    };
    const double m1 = half_moment(8000, 100);
    const double m2 = half_moment(16000, 100);
    CHECK(std::fabs(m2 - m1) / m1 < 0.02);
}

TEST_CASE("the half-strip complement has no stabilizing root-time moment") {
    // E[sqrt(tau)] is infinite there, so censored estimates keep climbing
    // as the time budget quadruples; the catenary stays flat under the
    // same protocol.
    const DomainOracle bad = halfstrip_complement();
    const DomainOracle cat = catenary_oracle();
    SimConfig cfg;
    cfg.dt_max = 1e-3;
    auto censored_moment = [&](const DomainOracle& o, double cap) {
        SimConfig c = cfg;
        c.time_cap = cap;
        const auto records = simulate_many(o, {0.0, 0.0}, 1200, 2024, c);
        double acc = 0.0;
        for (const ExitRecord& r : records) acc += std::sqrt(r.tau);
        return acc / static_cast<double>(records.size());
    };
    double prev_bad = censored_moment(bad, 12.5);
    double prev_cat = censored_moment(cat, 12.5);
    for (double cap : {50.0, 200.0}) {
        const double cur_bad = censored_moment(bad, cap);
        const double cur_cat = censored_moment(cat, cap);
        CHECK(cur_bad > prev_bad * 1.05); // still growing
        CHECK(std::fabs(cur_cat - prev_cat) / prev_cat < 0.02);
        prev_bad = cur_bad;
        prev_cat = cur_cat;
    }
}

TEST_CASE("runaway paths trip the step cap") {
    const AnalyticMap fc = build_map(Distribution::cauchy(), 64, MapVariant::FormalCauchy);
    const DomainOracle half = make_oracle(build_boundary(fc, 512));
    SimConfig cfg;
    cfg.dt_max = 1e-3;
    cfg.max_steps = 20000;
    CHECK_THROWS_AS(simulate_many(half, {0.0, 0.0}, 80, 5, cfg), NumericError);
}

TEST_CASE("consistency sampling validates the composition") {
    const AnalyticMap u = build_map(Distribution::uniform(-1, 1), 256, MapVariant::DeltaInfinity);
    const auto sample = consistency_sample(u, 100000, 99);
    CHECK(std::fabs(mean_of(sample)) < 0.01);

    const AnalyticMap a = build_map(Distribution::arcsine(), 256, MapVariant::DeltaInfinity);
    const auto sa = consistency_sample(a, 100000, 123);
    const Distribution arc = Distribution::arcsine();
    CHECK(ks_test(sa, [&arc](double x) { return arc.cdf(x); }).p_value > 0.01);
}

TEST_CASE("philox streams are deterministic and disjoint") {
    PhiloxStream a(1, 0), b(1, 0), c(1, 1);
    for (int i = 0; i < 100; ++i) {
        const double va = a.next_uniform();
        CHECK(va == b.next_uniform());
        CHECK(va != c.next_uniform());
        CHECK(va > 0.0);
        CHECK(va < 1.0);
    }
    // Normal moments sanity.
    PhiloxStream g(123, 7);
    double m = 0.0, v = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double z = g.next_normal();
        m += z;
        v += z * z;
    }
    m /= n;
    v = v / n - m * m;
    CHECK(std::fabs(m) < 0.01);
    CHECK(v == doctest::Approx(1.0).epsilon(0.02));
}
