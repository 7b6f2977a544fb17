#include "symnorm/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "symnorm/level_vector.hpp"
#include "symnorm/seeds.hpp"

namespace symnorm {

namespace {

using seeds::derive;
using seeds::label;

// Smallest/largest integers inside [powers[lvl-1], powers[lvl]).
// Returns nullopt when the band holds no integer.
std::optional<std::pair<int64_t, int64_t>> integer_band(const std::vector<double>& powers,
                                                        size_t lvl) {
    double lo = powers[lvl - 1];
    double hi = powers[lvl];
    int64_t first = static_cast<int64_t>(std::ceil(lo));
    if (static_cast<double>(first) < lo) ++first;
    int64_t last = static_cast<int64_t>(std::ceil(hi)) - 1;
    while (static_cast<double>(last) >= hi) --last;
    if (first > last || first < 1) return std::nullopt;
    return std::make_pair(first, last);
}

std::vector<StreamUpdate> planted_levels(const StreamSpec& spec) {
    uint64_t bound = spec.magnitude_bound ? spec.magnitude_bound
                                          : default_magnitude_bound(spec.n);
    size_t t = spec.level_counts.size();
    auto powers = level_powers(spec.base, t);
    int64_t total = std::accumulate(spec.level_counts.begin(), spec.level_counts.end(),
                                    int64_t{0});
    if (total > static_cast<int64_t>(spec.n))
        throw std::invalid_argument("planted counts exceed dimension");
    if (!spec.level_magnitudes.empty() && spec.level_magnitudes.size() != t)
        throw std::invalid_argument("level_magnitudes size mismatch");

    std::mt19937_64 rng(derive(spec.seed, {label("planted")}));

    // Distinct coordinates via a partial Fisher-Yates shuffle.
    std::vector<int64_t> idx(spec.n);
    std::iota(idx.begin(), idx.end(), 0);
    for (int64_t i = 0; i < total; ++i) {
        std::uniform_int_distribution<size_t> pick(static_cast<size_t>(i), spec.n - 1);
        std::swap(idx[static_cast<size_t>(i)], idx[pick(rng)]);
    }

    std::vector<StreamUpdate> out;
    out.reserve(static_cast<size_t>(total));
    size_t cursor = 0;
    for (size_t lvl = 1; lvl <= t; ++lvl) {
        int64_t count = spec.level_counts[lvl - 1];
        if (count == 0) continue;
        int64_t fixed = spec.level_magnitudes.empty() ? 0 : spec.level_magnitudes[lvl - 1];
        auto band = integer_band(powers, lvl);
        if (!band) throw std::invalid_argument("no integer magnitude inside level");
        for (int64_t c = 0; c < count; ++c) {
            int64_t mag = fixed;
            if (mag == 0) {
                std::uniform_int_distribution<int64_t> d(band->first, band->second);
                mag = d(rng);
            } else if (mag < band->first || mag > band->second) {
                throw std::invalid_argument("requested magnitude outside its level");
            }
            if (static_cast<uint64_t>(mag) > bound)
                throw std::invalid_argument("planted magnitude exceeds bound");
            int64_t sign = (rng() & 1) ? 1 : -1;
            out.push_back({idx[cursor++], sign * mag});
        }
    }
    std::shuffle(out.begin(), out.end(), rng);
    return out;
}

std::vector<StreamUpdate> random_turnstile(const StreamSpec& spec) {
    uint64_t bound = spec.magnitude_bound ? spec.magnitude_bound
                                          : default_magnitude_bound(spec.n);
    std::mt19937_64 rng(derive(spec.seed, {label("turnstile")}));
    std::uniform_int_distribution<int64_t> pick_index(0, static_cast<int64_t>(spec.n) - 1);
    std::uniform_int_distribution<int64_t> pick_delta(1, spec.max_delta);

    std::vector<int64_t> acc(spec.n, 0);
    std::vector<StreamUpdate> out;
    out.reserve(spec.updates);
    for (size_t u = 0; u < spec.updates; ++u) {
        int64_t i = pick_index(rng);
        int64_t d = pick_delta(rng) * ((rng() & 1) ? 1 : -1);
        int64_t next = acc[i] + d;
        if (static_cast<uint64_t>(std::abs(next)) > bound) d = -d;  // reflect at the cap
        acc[i] += d;
        out.push_back({i, d});
    }
    return out;
}

std::vector<StreamUpdate> single_spike(const StreamSpec& spec) {
    if (spec.spike_magnitude <= 0)
        throw std::invalid_argument("spike magnitude must be positive");
    uint64_t bound = spec.magnitude_bound ? spec.magnitude_bound
                                          : default_magnitude_bound(spec.n);
    if (static_cast<uint64_t>(spec.spike_magnitude) > bound)
        throw std::invalid_argument("spike magnitude exceeds bound");
    std::mt19937_64 rng(derive(spec.seed, {label("spike")}));
    int64_t i = spec.spike_index;
    if (i < 0) {
        std::uniform_int_distribution<int64_t> d(0, static_cast<int64_t>(spec.n) - 1);
        i = d(rng);
    }
    int64_t sign = (rng() & 1) ? 1 : -1;
    // Split into two partial updates to exercise accumulation.
    int64_t half = spec.spike_magnitude / 2;
    std::vector<StreamUpdate> out;
    if (half > 0) out.push_back({i, sign * half});
    out.push_back({i, sign * (spec.spike_magnitude - half)});
    return out;
}

}  // namespace

std::vector<StreamUpdate> generate_stream(const StreamSpec& spec) {
    if (spec.n == 0) throw std::invalid_argument("stream dimension must be positive");
    switch (spec.kind) {
        case StreamSpec::Kind::PlantedLevels: return planted_levels(spec);
        case StreamSpec::Kind::RandomTurnstile: return random_turnstile(spec);
        case StreamSpec::Kind::SingleSpike: return single_spike(spec);
    }
    throw std::invalid_argument("unknown stream kind");
}

StreamSpec stream_spec_from_json(const nlohmann::json& root) {
    const nlohmann::json& j = root.contains("stream") ? root.at("stream") : root;
    StreamSpec s;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "planted-levels") s.kind = StreamSpec::Kind::PlantedLevels;
    else if (kind == "random-turnstile") s.kind = StreamSpec::Kind::RandomTurnstile;
    else if (kind == "single-spike") s.kind = StreamSpec::Kind::SingleSpike;
    else throw std::invalid_argument("unknown stream kind: " + kind);
    s.n = j.at("n").get<size_t>();
    s.seed = j.value("seed", uint64_t{0});
    s.magnitude_bound = j.value("m", uint64_t{0});
    s.base = j.value("base", 2.0);
    if (j.contains("counts")) s.level_counts = j.at("counts").get<std::vector<int64_t>>();
    if (j.contains("magnitudes"))
        s.level_magnitudes = j.at("magnitudes").get<std::vector<int64_t>>();
    s.updates = j.value("updates", size_t{0});
    s.max_delta = j.value("max_delta", int64_t{8});
    s.spike_index = j.value("index", int64_t{-1});
    s.spike_magnitude = j.value("magnitude", int64_t{0});
    return s;
}

nlohmann::json stream_spec_to_json(const StreamSpec& s) {
    nlohmann::json j;
    switch (s.kind) {
        case StreamSpec::Kind::PlantedLevels: j["kind"] = "planted-levels"; break;
        case StreamSpec::Kind::RandomTurnstile: j["kind"] = "random-turnstile"; break;
        case StreamSpec::Kind::SingleSpike: j["kind"] = "single-spike"; break;
    }
    j["n"] = s.n;
    j["seed"] = s.seed;
    if (s.magnitude_bound) j["m"] = s.magnitude_bound;
    if (s.kind == StreamSpec::Kind::PlantedLevels) {
        j["base"] = s.base;
        j["counts"] = s.level_counts;
        if (!s.level_magnitudes.empty()) j["magnitudes"] = s.level_magnitudes;
    } else if (s.kind == StreamSpec::Kind::RandomTurnstile) {
        j["updates"] = s.updates;
        j["max_delta"] = s.max_delta;
    } else {
        j["index"] = s.spike_index;
        j["magnitude"] = s.spike_magnitude;
    }
    return nlohmann::json{{"stream", j}};
}

}  // namespace symnorm
