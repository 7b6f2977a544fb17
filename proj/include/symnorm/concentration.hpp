#ifndef SYMNORM_CONCENTRATION_HPP
#define SYMNORM_CONCENTRATION_HPP

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "symnorm/norms.hpp"

namespace symnorm {

struct ProfileRow {
    size_t k = 0;
    double median = 0.0;
    double max_value = 0.0;   // b_l on S^(k-1); heuristic lower bound if flagged
    bool heuristic_max = false;
    double mc = 0.0;          // max_value / median
};

/// Monte-Carlo concentration profile over a geometric dimension grid.
struct ConcentrationProfile {
    std::string norm_name;
    size_t n = 0;
    size_t samples_per_k = 0;
    uint64_t seed = 0;
    std::vector<ProfileRow> rows;
    double max_mc = 0.0;       // mmc estimate
    bool any_heuristic = false;

    const ProfileRow& row_for(size_t k) const;
};

/// Sample median of l on the uniform l_2 sphere in dimension k (normalized
/// independent Gaussians). Deterministic given the seed. samples >= 100.
double estimate_median(const SymmetricNorm& l, size_t k, size_t samples, uint64_t seed);

/// Max of l over S^(k-1): closed form when the oracle supplies one, otherwise
/// the best of the flat family xi^(1..k) refined by a seeded coordinate
/// ascent; the heuristic result is a lower bound and is flagged.
double estimate_max(const SymmetricNorm& l, size_t k, bool* heuristic = nullptr,
                    uint64_t seed = 0);

/// Geometric grid (ratio 2) including both endpoints {1, n}. grid_size == 0
/// selects the full ratio-2 grid; otherwise the grid has ~grid_size points.
std::vector<size_t> dimension_grid(size_t n, size_t grid_size);

ConcentrationProfile compute_mmc(const SymmetricNorm& l, size_t n, size_t grid_size,
                                 size_t samples, uint64_t seed, int threads = 0);

nlohmann::json profile_to_json(const ConcentrationProfile& p);
ConcentrationProfile profile_from_json(const nlohmann::json& j);

}  // namespace symnorm

#endif
