#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "cskor/distribution.hpp"
#include "cskor/quadrature.hpp"
#include "cskor/rng.hpp"

using namespace cskor;

namespace {

constexpr double kPi = std::numbers::pi;

// Independent inversion oracle: plain bisection on the cdf.
double bisect_quantile(const Distribution& d, double u, double lo, double hi) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (d.cdf(mid) <= u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("cdf closed forms") {
    CHECK(Distribution::uniform(-1, 1).cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Distribution::hypsech().cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));

    // F(1) = (2/pi) atan(e^{pi/2}); cross-checked below against the density.
    const double expected = (2.0 / kPi) * std::atan(std::exp(kPi / 2.0));
    CHECK(Distribution::hypsech().cdf(1.0) == doctest::Approx(expected).epsilon(1e-15));

    CHECK(Distribution::uniform(-1, 1).cdf(-2.0) == 0.0);
    CHECK(Distribution::uniform(-1, 1).cdf(2.0) == 1.0);
    CHECK(Distribution::arcsine().cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Distribution::cauchy().cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("hypsech cdf is the antiderivative of its density") {
    const Distribution d = Distribution::hypsech();
    // F'(x) == density by central differences.
    for (double x : {-2.0, -0.7, 0.0, 0.4, 1.0, 2.5}) {
        const double h = 1e-6;
        const double fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(*d.density(x)).epsilon(1e-8));
    }
    // F(1) - F(-1) == integral of the density over [-1, 1].
    const auto q = integrate([&d](double x) { return *d.density(x); }, -1.0, 1.0, 1e-14, 1e-13);
    CHECK(q.converged);
    CHECK(d.cdf(1.0) - d.cdf(-1.0) == doctest::Approx(q.value).epsilon(1e-12));
}

TEST_CASE("quantile closed forms and numeric inversion") {
    CHECK(Distribution::uniform(-1, 1).quantile(0.75) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(Distribution::arcsine().quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));

    const double expected = (2.0 / kPi) * std::log(std::tan(0.45 * kPi));
    const Distribution hs = Distribution::hypsech();
    CHECK(hs.quantile(0.9) == doctest::Approx(expected).epsilon(1e-14));
    // Brute-force bisection on the cdf agrees with the closed form.
    CHECK(bisect_quantile(hs, 0.9, -60.0, 60.0) == doctest::Approx(hs.quantile(0.9)).epsilon(1e-11));

    CHECK_THROWS_AS(hs.quantile(0.0), ValidationError);
    CHECK_THROWS_AS(hs.quantile(1.0), ValidationError);
    CHECK_THROWS_AS(hs.quantile(-0.5), ValidationError);
}

TEST_CASE("gaussian and custom laws invert their cdf") {
    const Distribution g = Distribution::gaussian(0.0, 1.0);
    for (double u : {1e-8, 0.001, 0.1, 0.5, 0.9, 0.999, 1.0 - 1e-8}) {
        CHECK(g.cdf(g.quantile(u)) == doctest::Approx(u).epsilon(1e-11));
    }
    // A custom wrapper around the uniform cdf must reproduce the closed form.
    const Distribution c = Distribution::custom(
        "wrapped_uniform", [](double x) { return std::clamp(0.5 * (x + 1.0), 0.0, 1.0); }, -1.0,
        1.0, [](double x) { return std::fabs(x) <= 1.0 ? 0.5 : 0.0; });
    for (double u : {0.05, 0.3, 0.75, 0.97}) {
        CHECK(c.quantile(u) == doctest::Approx(2.0 * u - 1.0).epsilon(1e-11));
    }
}

TEST_CASE("density values and availability") {
    CHECK(*Distribution::uniform(-1, 1).density(0.0) == doctest::Approx(0.5));
    CHECK(*Distribution::arcsine().density(0.0) == doctest::Approx(1.0 / kPi).epsilon(1e-15));
    const Distribution two = Distribution::atomic({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK_FALSE(two.density(0.0).has_value());
}

TEST_CASE("support and moments") {
    const SupportMoments u = Distribution::uniform(-1, 1).support_and_moments(2.0);
    CHECK(u.alpha == doctest::Approx(-1.0));
    CHECK(u.beta == doctest::Approx(1.0));
    CHECK(u.mean == doctest::Approx(0.0));
    CHECK(u.p_moment == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(u.nondegenerate);

    const SupportMoments pm = Distribution::atomic({{0.0, 1.0}}).support_and_moments(2.0);
    CHECK(pm.alpha == 0.0);
    CHECK(pm.beta == 0.0);
    CHECK(pm.mean == 0.0);
    CHECK(pm.p_moment == 0.0);
    CHECK_FALSE(pm.nondegenerate);

    const Distribution hs = Distribution::hypsech();
    const SupportMoments h = hs.support_and_moments(2.0);
    CHECK(std::isinf(h.alpha));
    CHECK(std::isinf(h.beta));
    CHECK(h.alpha < 0.0);
    CHECK(h.mean == doctest::Approx(0.0));
    CHECK(std::isfinite(h.p_moment));
    CHECK(h.nondegenerate);

    // Same second moment two ways: x-space density quadrature vs the
    // quantile-space value reported above.
    const auto xq = integrate([&hs](double x) { return x * x * *hs.density(x); }, -60.0, 60.0,
                              1e-13, 1e-12);
    CHECK(xq.converged);
    CHECK(h.p_moment == doctest::Approx(xq.value).epsilon(1e-9));

    CHECK_THROWS_AS(hs.support_and_moments(1.0), ValidationError);
}

TEST_CASE("cauchy has no usable moments") {
    const Distribution c = Distribution::cauchy();
    CHECK(std::isinf(c.support_and_moments(2.0).p_moment));
    CHECK(std::isinf(c.support_and_moments(1.5).p_moment));
    CHECK_THROWS_AS(c.centered(), ValidationError);
    CHECK(c.quantile(0.25) == doctest::Approx(-1.0).epsilon(1e-14)); // -cot(pi/4)
}

TEST_CASE("centering") {
    const Distribution u = Distribution::uniform(0, 2).centered();
    CHECK(u.support().first == doctest::Approx(-1.0));
    CHECK(u.support().second == doctest::Approx(1.0));
    CHECK(u.mean() == doctest::Approx(0.0));

    const Distribution a = Distribution::atomic({{0.0, 0.5}, {2.0, 0.5}}).centered();
    CHECK(a.atoms()[0].location == doctest::Approx(-1.0));
    CHECK(a.atoms()[1].location == doctest::Approx(1.0));

    // Idempotence on centered inputs.
    const Distribution same = Distribution::uniform(-1, 1).centered();
    CHECK(same.support().first == -1.0);
    CHECK(same.support().second == 1.0);

    for (const Distribution& d :
         {Distribution::uniform(3, 9), Distribution::gaussian(4.2, 1.3),
          Distribution::atomic({{-3.0, 0.25}, {1.0, 0.5}, {2.0, 0.25}})}) {
        const double m0 = d.mean();
        CHECK(std::fabs(d.centered().mean()) <= 1e-12 * (1.0 + std::fabs(m0)));
    }
}

TEST_CASE("from_samples") {
    const std::vector<double> v{-1.0, 0.0, 1.0};
    const Distribution d = Distribution::from_samples(v);
    REQUIRE(d.atoms().size() == 3);
    CHECK(d.atoms()[0].weight == doctest::Approx(1.0 / 3.0));
    CHECK(d.atoms()[1].location == 0.0);

    const std::vector<double> flat{5.0, 5.0, 5.0};
    CHECK_THROWS_AS(Distribution::from_samples(flat), DegenerateError);
    const std::vector<double> one{5.0};
    CHECK_THROWS_AS(Distribution::from_samples(one), ValidationError);

    // Order-statistic identity: quantile at (k - 1/2)/n returns the sorted
    // sample exactly.
    std::vector<double> data{3.5, -2.0, 0.25, 7.0, -9.5, 1.0};
    const Distribution e = Distribution::from_samples(data);
    std::sort(data.begin(), data.end());
    for (std::size_t k = 0; k < data.size(); ++k) {
        const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(data.size());
        CHECK(e.quantile(u) == data[k]);
    }
}

TEST_CASE("empirical quantile approaches the generating quantile") {
    // 1e4 uniform draws: sup distance of the empirical quantile from
    // 2u - 1 on [0.05, 0.95] stays below 0.05 (far outside the DKW band).
    PhiloxStream rng(20240817, 0);
    std::vector<double> draws(10000);
    for (double& v : draws) v = 2.0 * rng.next_uniform() - 1.0;
    const Distribution emp = Distribution::from_samples(draws);
    double worst = 0.0;
    for (int i = 0; i <= 900; ++i) {
        const double u = 0.05 + 0.9 * i / 900.0;
        worst = std::max(worst, std::fabs(emp.quantile(u) - (2.0 * u - 1.0)));
    }
    CHECK(worst < 0.05);
}

TEST_CASE("quantile monotonicity and inverse identities") {
    PhiloxStream rng(7, 0);
    const std::vector<Distribution> laws = {
        Distribution::uniform(-1, 1), Distribution::arcsine(), Distribution::hypsech(),
        Distribution::gaussian(0, 1),
        Distribution::atomic({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}})};
    for (const Distribution& d : laws) {
        for (int i = 0; i < 200; ++i) {
            double u1 = rng.next_uniform(), u2 = rng.next_uniform();
            if (u1 > u2) std::swap(u1, u2);
            CHECK(d.quantile(u1) <= d.quantile(u2));
        }
    }
    // Atomless builtins: cdf(quantile(u)) == u on a dense grid.
    for (const Distribution& d :
         {Distribution::uniform(-1, 1), Distribution::arcsine(), Distribution::hypsech()}) {
        for (int i = 1; i < 400; ++i) {
            const double u = i / 400.0;
            CHECK(std::fabs(d.cdf(d.quantile(u)) - u) <= 1e-12);
        }
    }
}

TEST_CASE("atomic quantile follows the sup convention") {
    const Distribution d = Distribution::atomic({{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}});
    CHECK(d.quantile(0.1) == -1.0);
    CHECK(d.quantile(0.25) == 0.0); // right-continuous at the jump
    CHECK(d.quantile(0.5) == 0.0);
    CHECK(d.quantile(0.75) == 1.0);
    CHECK(d.quantile(0.9) == 1.0);
    CHECK(d.cdf(-1.0) == doctest::Approx(0.25));
    CHECK(d.cdf(0.5) == doctest::Approx(0.75));
}

TEST_CASE("spec string parsing") {
    const Distribution u = Distribution::parse("kind=uniform a=-1 b=1");
    CHECK(u.kind() == DistKind::Uniform);
    CHECK(u.quantile(0.75) == doctest::Approx(0.5));

    const Distribution a = Distribution::parse("kind=atomic points=-1:0.5,1:0.5");
    CHECK(a.atoms().size() == 2);

    CHECK_THROWS_AS(Distribution::parse("kind=nope"), ValidationError);
    CHECK_THROWS_AS(Distribution::parse("a=1 b=2"), ValidationError);
    CHECK_THROWS_AS(Distribution::parse("kind=uniform a=1 b=x"), ValidationError);

    // Round trip through the flat text form.
    const Distribution back = Distribution::parse(u.spec_string());
    CHECK(back.quantile(0.3) == u.quantile(0.3));
}
