#ifndef SYMNORM_GENERATORS_HPP
#define SYMNORM_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symnorm/stream.hpp"

namespace symnorm {

/// Deterministic synthetic stream description. Identical specs (kind,
/// parameters, seed) always reproduce identical update sequences.
struct StreamSpec {
    enum class Kind { PlantedLevels, RandomTurnstile, SingleSpike };

    Kind kind = Kind::RandomTurnstile;
    size_t n = 0;
    uint64_t magnitude_bound = 0;  // 0 -> n^3
    uint64_t seed = 0;

    // planted-levels
    double base = 2.0;
    std::vector<int64_t> level_counts;          // 1-based levels
    std::vector<int64_t> level_magnitudes;      // optional; 0 -> seeded draw in level

    // random-turnstile
    size_t updates = 0;
    int64_t max_delta = 8;

    // single-spike
    int64_t spike_index = -1;  // -1 -> seeded draw
    int64_t spike_magnitude = 0;
};

/// Generates the update sequence; a pure function of the spec.
/// Throws std::invalid_argument on infeasible specs (counts exceed n, no
/// integer magnitude inside a requested level, magnitude above the bound).
std::vector<StreamUpdate> generate_stream(const StreamSpec& spec);

StreamSpec stream_spec_from_json(const nlohmann::json& j);
nlohmann::json stream_spec_to_json(const StreamSpec& spec);

}  // namespace symnorm

#endif
