#include "symnorm/samplelevel.hpp"

#include <future>
#include <stdexcept>
#include <thread>

#include "symnorm/seeds.hpp"

namespace symnorm {

using seeds::combine;
using seeds::derive;
using seeds::label;

SampleLevelSketch::SampleLevelSketch(const SampleLevelParams& params, uint64_t seed)
    : params_(params), seed_(seed) {
    if (params.phi_max < 0 || params.phi_max > 62)
        throw std::invalid_argument("phi_max out of range");
    if (params.reps < 1 || params.block < 1)
        throw std::invalid_argument("reps and block must be positive");
    int phys = params.physical_reps();
    rep_seeds_.reserve(static_cast<size_t>(phys));
    tables_.reserve(params.table_count());
    for (int r = 0; r < phys; ++r) {
        rep_seeds_.push_back(derive(seed, {label("member"), static_cast<uint64_t>(r)}));
        for (int phi = 0; phi <= params.phi_max; ++phi)
            tables_.emplace_back(params.cs,
                                 derive(seed, {label("table"), static_cast<uint64_t>(phi),
                                               static_cast<uint64_t>(r)}));
    }
}

// Independent membership bits for all phi of one (rep, index) pair come from
// disjoint bit ranges of successive hash words: phi bits all zero <=> member,
// so the marginal rate is exactly 2^-phi.
bool SampleLevelSketch::member(int phi, int rep, int64_t index) const {
    if (phi == 0) return true;
    uint64_t base = combine(rep_seeds_[static_cast<size_t>(rep)],
                            static_cast<uint64_t>(index));
    uint64_t word = base;
    int used = 0;
    for (int f = 1; f <= params_.phi_max; ++f) {
        if (used + f > 64) {
            word = seeds::mix(base + 0x6b79c8e5u + static_cast<uint64_t>(f));
            base = word;
            used = 0;
        }
        if (f == phi) {
            uint64_t bits = (word >> used) & ((uint64_t{1} << f) - 1);
            return bits == 0;
        }
        used += f;
    }
    throw std::invalid_argument("phi out of range");
}

void SampleLevelSketch::update(const StreamUpdate& u) {
    int phys = params_.physical_reps();
    for (int r = 0; r < phys; ++r) ingest_rep(r, std::span<const StreamUpdate>(&u, 1));
}

void SampleLevelSketch::ingest_rep(int rep, std::span<const StreamUpdate> updates) {
    uint64_t rep_seed = rep_seeds_[static_cast<size_t>(rep)];
    CountSketchTable* base_table = &tables_[cell(0, rep)];
    for (const auto& u : updates) {
        base_table->update(u);
        if (params_.phi_max == 0) continue;
        uint64_t base = combine(rep_seed, static_cast<uint64_t>(u.index));
        uint64_t word = base;
        int used = 0;
        for (int phi = 1; phi <= params_.phi_max; ++phi) {
            if (used + phi > 64) {
                word = seeds::mix(base + 0x6b79c8e5u + static_cast<uint64_t>(phi));
                base = word;
                used = 0;
            }
            uint64_t bits = (word >> used) & ((uint64_t{1} << phi) - 1);
            used += phi;
            if (bits == 0) base_table[phi].update(u);
        }
    }
}

void SampleLevelSketch::ingest(std::span<const StreamUpdate> updates, int threads) {
    int phys = params_.physical_reps();
    unsigned hw = threads > 0 ? static_cast<unsigned>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
    if (hw <= 1 || phys == 1) {
        for (int r = 0; r < phys; ++r) ingest_rep(r, updates);
        return;
    }
    unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(phys));
    std::vector<std::future<void>> futs;
    for (unsigned w = 0; w < workers; ++w) {
        futs.push_back(std::async(std::launch::async, [this, w, workers, phys, updates] {
            for (int r = static_cast<int>(w); r < phys; r += static_cast<int>(workers))
                ingest_rep(r, updates);
        }));
    }
    for (auto& f : futs) f.get();
}

void SampleLevelSketch::merge(const SampleLevelSketch& other) {
    if (other.seed_ != seed_ || other.params_.phi_max != params_.phi_max ||
        other.params_.physical_reps() != params_.physical_reps())
        throw std::invalid_argument("merge requires identically seeded sketches");
    for (size_t i = 0; i < tables_.size(); ++i) tables_[i].merge(other.tables_[i]);
}

size_t SampleLevelSketch::counter_count() const {
    size_t c = 0;
    for (const auto& t : tables_) c += t.counter_count();
    return c;
}

}  // namespace symnorm
