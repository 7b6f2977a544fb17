#ifndef SYMNORM_SAMPLELEVEL_HPP
#define SYMNORM_SAMPLELEVEL_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "symnorm/countsketch.hpp"
#include "symnorm/stream.hpp"

namespace symnorm {

struct SampleLevelParams {
    size_t n = 0;          // index universe
    int phi_max = 0;       // deepest subsampling level; rate 2^-phi
    int reps = 1;          // occupancy repetitions R
    int block = 1;         // parallel repetitions per block (one-pass discard)
    CsConfig cs;

    int physical_reps() const { return reps * block; }
    size_t table_count() const {
        return static_cast<size_t>(phi_max + 1) * static_cast<size_t>(physical_reps());
    }
};

/// The (phi x rep) grid of subsampled CountSketch tables. Substream
/// membership is a deterministic predicate of (seed, phi, rep, index) with
/// marginal rate 2^-phi, independent across cells (not nested).
class SampleLevelSketch {
  public:
    SampleLevelSketch(const SampleLevelParams& params, uint64_t seed);

    bool member(int phi, int rep, int64_t index) const;

    void update(const StreamUpdate& u);
    /// Rep-major batch ingestion; deterministic regardless of thread count.
    void ingest(std::span<const StreamUpdate> updates, int threads = 0);

    /// Counter-wise merge of an identically-seeded sketch (shard join).
    void merge(const SampleLevelSketch& other);

    const CountSketchTable& table(int phi, int rep) const {
        return tables_[cell(phi, rep)];
    }
    const SampleLevelParams& params() const { return params_; }
    uint64_t seed() const { return seed_; }
    size_t counter_count() const;

  private:
    size_t cell(int phi, int rep) const {
        return static_cast<size_t>(rep) * static_cast<size_t>(params_.phi_max + 1) +
               static_cast<size_t>(phi);
    }
    void ingest_rep(int rep, std::span<const StreamUpdate> updates);

    SampleLevelParams params_;
    uint64_t seed_;
    std::vector<uint64_t> rep_seeds_;
    std::vector<CountSketchTable> tables_;  // rep-major
};

}  // namespace symnorm

#endif
