#include "symnorm/estimator.hpp"

#include <cmath>
#include <stdexcept>

#include "symnorm/concentration.hpp"
#include "symnorm/seeds.hpp"

namespace symnorm {

using seeds::derive;
using seeds::label;

double EstimatorConfig::resolved_delta(size_t n) const {
    return delta > 0 ? delta : 0.01 * eps / static_cast<double>(n);
}

double EstimatorConfig::resolved_mmc() const {
    if (!(mmc > 0)) throw std::invalid_argument("mmc calibration input unavailable");
    return mmc_is_heuristic ? 2.0 * mmc : mmc;
}

double EstimatorConfig::eps_prime(size_t n) const {
    return c1 * eps * eps / std::log(static_cast<double>(n));
}

double EstimatorConfig::beta_prime(size_t n) const {
    double ln_n = std::log(static_cast<double>(n));
    double mm = resolved_mmc();
    double b = c2 * std::pow(eps, 5.0) / (mm * mm * std::pow(ln_n, 5.0));
    return std::min(1.0, b);
}

double EstimatorConfig::gamma() const { return c3 * eps; }

Level1Config EstimatorConfig::level1_config(size_t n) const {
    double ep = eps_prime(n);
    if (!(ep < eps)) throw std::invalid_argument("derived eps' must stay below eps");
    Level1Config lc;
    lc.gamma = gamma();
    lc.beta = beta_prime(n);
    lc.eps = ep;
    lc.delta = resolved_delta(n);
    lc.x_override = x_override;
    lc.c_R = c_R;
    lc.c_beta = c_beta;
    lc.lab = lab;
    // The Theta(eps) deflation applies to the estimator's own eps scale, not
    // to the tiny per-bucket eps'.
    lc.lab.deflate_scale = lab.deflate_scale * eps / ep;
    return lc;
}

EstimateResult one_pass_symmetric_norm(std::span<const StreamUpdate> updates,
                                       const SymmetricNorm& l, size_t n, uint64_t m,
                                       const EstimatorConfig& cfg, uint64_t seed) {
    Level1Config lc = cfg.level1_config(n);
    EstimateResult res;
    res.levels = run_level1(updates, n, m, lc, seed);
    LevelVector lv = res.levels.rounded(n);
    LevelVectorView view(lv, n);
    res.value = l.evaluate(view);
    res.params = {{"eps", cfg.eps},
                  {"delta", cfg.resolved_delta(n)},
                  {"mmc", cfg.resolved_mmc()},
                  {"eps_prime", lc.eps},
                  {"beta_prime", lc.beta},
                  {"gamma", lc.gamma},
                  {"alpha", res.levels.base},
                  {"counter_count", res.levels.counter_count},
                  {"norm", l.name()}};
    return res;
}

double h_xi(const SymmetricNorm& l, size_t n_prime, double D) {
    if (n_prime < 1) throw std::invalid_argument("n' must be >= 1");
    if (D < 1.0) throw std::invalid_argument("D must be >= 1");
    double flat = l.evaluate_flat(n_prime);
    double max_l = estimate_max(l, n_prime, nullptr, 0);
    return std::min(D * flat, max_l);
}

double TradeoffConfig::beta(size_t n) const {
    return c4 / std::log(static_cast<double>(n));
}

double TradeoffConfig::beta_prime(size_t n) const {
    if (!(mmc > 0)) throw std::invalid_argument("mmc calibration input unavailable");
    double ln_n = std::log(static_cast<double>(n));
    double b = beta(n);
    return std::min(1.0, c5 * D * D * b * b / (ln_n * ln_n * mmc * mmc));
}

Level1Config TradeoffConfig::level1_config(size_t n) const {
    if (!(D >= 1.1)) throw std::invalid_argument("D must be at least 1.1");
    if (mmc > 0 && D > mmc)
        throw std::invalid_argument("D must not exceed the mmc estimate");
    if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("eps must lie in (0, 1/2)");
    Level1Config lc;
    lc.gamma = gamma;
    lc.beta = beta_prime(n);
    lc.eps = eps;
    lc.delta = delta;
    lc.x_override = x_override;
    lc.c_R = c_R;
    lc.lab = lab;
    return lc;
}

TradeoffResult tradeoff_estimate(std::span<const StreamUpdate> updates,
                                 const SymmetricNorm& l, size_t n, uint64_t m,
                                 const TradeoffConfig& cfg, uint64_t seed) {
    Level1Config lc = cfg.level1_config(n);
    TradeoffResult res;
    res.levels = run_level1(updates, n, m, lc, seed);
    res.counter_count = res.levels.counter_count;

    LevelVector lv = res.levels.rounded(n);
    double power = 1.0;
    double sum = 0.0;
    for (size_t i = 0; i < lv.counts.size(); ++i) {
        power *= res.levels.base;
        int64_t b = lv.counts[i];
        if (b < 1) continue;
        double l2_bucket = power * std::sqrt(static_cast<double>(b));
        sum += h_xi(l, static_cast<size_t>(b), cfg.D) * l2_bucket;
    }
    res.h_raw = sum;
    double ln_n = std::log(static_cast<double>(n));
    res.recentred = sum / std::sqrt(cfg.D * cfg.recenter_lambda * ln_n);
    res.halved_support_slack = true;  // b-hat inside h loses at most a factor 2
    res.params = {{"D", cfg.D},
                  {"beta", cfg.beta(n)},
                  {"beta_prime", cfg.beta_prime(n)},
                  {"eps", cfg.eps},
                  {"gamma", cfg.gamma},
                  {"alpha", res.levels.base},
                  {"recenter_lambda", cfg.recenter_lambda},
                  {"counter_count", res.counter_count},
                  {"norm", l.name()}};
    return res;
}

size_t tradeoff_counter_count(const TradeoffConfig& cfg, size_t n, uint64_t m) {
    Level1Config lc = cfg.level1_config(n);
    double ln_n = std::log(static_cast<double>(n));
    double eps_cs = lc.gamma * lc.gamma / (8.0 * ln_n);
    int block = lc.lab.block_override > 0
                    ? lc.lab.block_override
                    : static_cast<int>(std::ceil(std::log(static_cast<double>(n) * n / lc.delta)));
    auto params = derive_sample_params(n, m, 1.0 + lc.gamma / 2.0, lc.beta, eps_cs,
                                       lc.delta, lc.c_R, lc.c_beta, lc.eps, block, lc.lab);
    return params.table_count() * static_cast<size_t>(params.cs.depth) *
           static_cast<size_t>(params.cs.width);
}

}  // namespace symnorm
