#ifndef SYMNORM_ESTIMATOR_HPP
#define SYMNORM_ESTIMATOR_HPP

#include <cstdint>
#include <optional>
#include <span>

#include "json.hpp"
#include "symnorm/level_estimator.hpp"
#include "symnorm/norms.hpp"

namespace symnorm {

/// Configuration for the (1 +- eps) one-pass estimator. The derived
/// parameters follow eps' = c1 eps^2 / ln n, beta' = c2 eps^5 / (mmc^2 ln^5 n)
/// and gamma = c3 eps; the failure budget defaults to 0.01 eps / n.
struct EstimatorConfig {
    double eps = 0.2;
    double delta = 0.0;  // 0 -> 0.01*eps/n
    double mmc = 0.0;    // calibration input; must be positive
    bool mmc_is_heuristic = false;  // heuristic profiles get a 2x safety factor
    double c1 = 1.0, c2 = 1.0, c3 = 1.0;
    double c_R = 1.0, c_beta = 1.0;
    std::optional<double> x_override;
    LevelLab lab;

    double resolved_delta(size_t n) const;
    double resolved_mmc() const;
    double eps_prime(size_t n) const;
    double beta_prime(size_t n) const;
    double gamma() const;
    Level1Config level1_config(size_t n) const;
};

struct EstimateResult {
    double value = 0.0;
    LevelEstimate levels;
    nlohmann::json params;
};

/// Algorithm: run the one-pass level estimator, materialize the estimated
/// level vector as a coordinate-query view, and hand that view to the norm
/// oracle. Returns l(V-hat).
EstimateResult one_pass_symmetric_norm(std::span<const StreamUpdate> updates,
                                       const SymmetricNorm& l, size_t n, uint64_t m,
                                       const EstimatorConfig& cfg, uint64_t seed);

/// h(xi^(n')) = min(D * l(xi^(n')), max of l on S^(n'-1)).
double h_xi(const SymmetricNorm& l, size_t n_prime, double D);

/// Coarse-approximation configuration: beta = c4 / ln n and
/// beta' = c5 D^2 beta^2 / (ln^2 n * mmc^2); constant-precision Level1.
struct TradeoffConfig {
    double D = 4.0;
    double mmc = 0.0;
    double eps = 0.3;    // constant precision in (0, 1/2)
    double gamma = 0.5;  // constant base parameter
    double delta = 0.01;
    double c4 = 1.0, c5 = 1.0;
    double c_R = 1.0;
    double recenter_lambda = 0.35;  // fitted once on calibration streams
    std::optional<double> x_override;
    LevelLab lab;

    double beta(size_t n) const;
    double beta_prime(size_t n) const;
    Level1Config level1_config(size_t n) const;
};

struct TradeoffResult {
    double h_raw = 0.0;        // sandwiched value: l(v) <= c a' H, H <= c' D ln n l(v)
    double recentred = 0.0;    // h_raw / sqrt(D * lambda * ln n)
    bool halved_support_slack = false;  // factor-2 slack on b-hat inside h
    LevelEstimate levels;
    size_t counter_count = 0;
    nlohmann::json params;
};

TradeoffResult tradeoff_estimate(std::span<const StreamUpdate> updates,
                                 const SymmetricNorm& l, size_t n, uint64_t m,
                                 const TradeoffConfig& cfg, uint64_t seed);

/// Counters the tradeoff sketch would allocate for a given config (the
/// 1/D^2 shrinkage accounting).
size_t tradeoff_counter_count(const TradeoffConfig& cfg, size_t n, uint64_t m);

}  // namespace symnorm

#endif
