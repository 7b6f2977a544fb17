#ifndef SYMNORM_LEVEL_ESTIMATOR_HPP
#define SYMNORM_LEVEL_ESTIMATOR_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "json.hpp"
#include "symnorm/level_vector.hpp"
#include "symnorm/samplelevel.hpp"

namespace symnorm {

/// Inverts the hit rate eta = 1 - (1-p)^b at p = 2^-phi back to the level
/// count b. At phi = 0 the rate saturates (p = 1), so a positive rate only
/// certifies one item.
double level_count_from_hit_rate(double eta, int phi);

/// Recovered level counts plus estimation diagnostics.
struct LevelEstimate {
    double base = 0.0;               // alpha (two-pass) or alpha' (one-pass)
    double x = 0.0;                  // realized boundary draw; 0 for two-pass
    std::vector<double> counts;      // b-hat, slot i holds level i+1
    std::vector<int> deepest_depth;  // q_i; -1 when undefined
    std::vector<double> hit_rate;    // eta-hat
    std::vector<std::vector<int>> occupancy;  // A[phi][level]
    double occupancy_threshold = 0.0;
    size_t counter_count = 0;
    int64_t discarded_maps = 0;      // one-pass discard-rule hits
    int64_t empty_blocks = 0;        // blocks whose every map was discarded

    /// Nearest-integer counts, truncated so the total fits the dimension.
    LevelVector rounded(size_t dim) const;
};

/// Scale-down knobs for desk-scale runs. Zero/default values select the
/// printed formulas.
struct LevelLab {
    double r_scale = 1.0;
    int r_floor = 16;
    int r_cap = 1 << 20;
    int d_override = 0;
    int w_override = 0;
    double w_kappa = 0.0;  // >0: width = max(w_floor, ceil(w_kappa / beta_cs))
    int w_floor = 8;
    int cert_quorum = 0;  // agreeing rows required per map entry; 0 = all
    int block_override = 0;
    double beta_cs_floor = 0.0;
    double deflate_scale = 0.5;  // Theta(eps) deflation constant in eta-hat
    int threads = 0;
};

LevelLab lab_from_json(const nlohmann::json& j);
nlohmann::json lab_to_json(const LevelLab& lab);

struct TwoPassConfig {
    double alpha = 2.0;
    double beta = 0.01;
    double eps = 0.2;
    double delta = 0.01;
    double c_R = 1.0;
    double c_beta = 1.0;
    LevelLab lab;
};

struct Level1Config {
    double gamma = 0.5;  // base alpha' = 1 + x*gamma, x in [1/2, 1]
    double beta = 0.01;
    double eps = 0.2;
    double delta = 0.01;
    std::optional<double> x_override;
    double c_R = 1.0;
    double c_beta = 1.0;
    LevelLab lab;
};

/// Sketch parameters realized from a config (R, Phi, block, table sizing).
SampleLevelParams derive_sample_params(size_t n, uint64_t m, double base_floor,
                                       double beta, double eps_cs, double delta,
                                       double c_R, double c_beta, double eps,
                                       int block, const LevelLab& lab);

/// Two-pass estimator: pass one builds the subsampled sketch, pass two
/// replaces recovered estimates with exact frequencies.
LevelEstimate estimate_levels_two_pass(std::span<const StreamUpdate> updates, size_t n,
                                       uint64_t m, const TwoPassConfig& cfg,
                                       uint64_t seed);

/// One-pass pipeline, split so callers can stream into the sketch themselves.
SampleLevelSketch make_level1_sketch(const Level1Config& cfg, size_t n, uint64_t m,
                                     uint64_t seed);
LevelEstimate level1_finalize(const SampleLevelSketch& sk, const Level1Config& cfg,
                              size_t n, uint64_t m, uint64_t seed);
LevelEstimate run_level1(std::span<const StreamUpdate> updates, size_t n, uint64_t m,
                         const Level1Config& cfg, uint64_t seed);

nlohmann::json level_estimate_to_json(const LevelEstimate& le, bool include_occupancy = false);

}  // namespace symnorm

#endif
