#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cskor/analytic_map.hpp"
#include "cskor/boundary.hpp"

namespace cskor {

struct SimConfig {
    double dt_max = 1e-4;      // hard step cap
    double step_factor = 0.1;  // dt = min(dt_max, step_factor * dist^2)
    double absorb_dist = 1e-6; // projection distance once this close
    std::uint64_t max_steps = 1'000'000'000;
    double time_cap = 0.0; // > 0: censor paths at this running time
};

struct ExitRecord {
    double x = 0.0, y = 0.0;
    double tau = 0.0;
    std::uint64_t steps = 0;
    std::uint64_t path_index = 0;
    bool censored = false;
};

/// One Brownian path from `start` until it leaves the domain. Steps are
/// Gaussian with dt tied to the squared distance scale; a membership sign
/// change is resolved by bisecting the crossing segment. The RNG stream is
/// (seed, path_index), so runs are reproducible under any scheduling.
ExitRecord simulate_exit(const DomainOracle& oracle, std::pair<double, double> start,
                         std::uint64_t seed, std::uint64_t path_index, const SimConfig& cfg);

/// n paths in a worker pool; records land at their path index.
std::vector<ExitRecord> simulate_many(const DomainOracle& oracle, std::pair<double, double> start,
                                      int n_paths, std::uint64_t seed, const SimConfig& cfg,
                                      int threads = 0);

struct KsResult {
    double stat = 0.0;
    double p_value = 0.0; // NaN below 8 samples
};

/// Kolmogorov-Smirnov statistic of the sample against a reference CDF,
/// with the asymptotic-series p-value.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

struct RateFit {
    double lambda = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    int points = 0;
};

/// Decay rate of -ln P(t < tau) over the window 0.002 <= P <= 0.2, by a
/// weighted least-squares fit lambda*t + beta*ln t + c with beta >= 0. The
/// ln t term absorbs the polynomial prefactor of upward-open domains and
/// vanishes on clean exponential data. Throws NumericError when fewer
/// than 5 survival points fall inside the window.
RateFit estimate_rate(std::span<const std::pair<double, double>> survival);

/// pi^2 / (2 (beta-alpha)^2); zero for unbounded support.
double minimal_rate(double alpha, double beta);

struct VerifyConfig {
    SimConfig sim;
    std::uint64_t seed = 1;
    std::vector<double> p_list = {1.0, 2.0};
    int survival_points = 64;
    int threads = 0;
};

struct VerificationReport {
    int n_paths = 0;
    double ks_stat = 0.0;
    double ks_p_value = 0.0;
    std::vector<std::pair<double, double>> moment_estimates; // p -> E[tau^{p/2}]
    RateFit rate_fit;
    bool rate_detected = false;
    double formula_rate = 0.0;
    std::uint64_t seed = 0;
    double dt_max = 0.0;
    double mean_exit_x = 0.0;
    std::vector<std::pair<double, double>> survival;
    std::vector<double> exit_x;
};

/// Full Monte Carlo check of a domain against its generating law:
/// KS of Re(exit), exit-time moments, survival curve and fitted rate.
VerificationReport run_verification(const Distribution& d, const DomainOracle& oracle,
                                    int n_paths, const VerifyConfig& cfg);

/// Quantile samples at uniform angles: validates the composition, not the
/// domain. Reported as "consistency mode".
std::vector<double> consistency_sample(const AnalyticMap& m, int n, std::uint64_t seed);

std::string report_to_json(const VerificationReport& r);

} // namespace cskor
