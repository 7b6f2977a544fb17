#ifndef SYMNORM_COUNTSKETCH_HPP
#define SYMNORM_COUNTSKETCH_HPP

#include <cstdint>
#include <vector>

#include "symnorm/stream.hpp"

namespace symnorm {

struct HeavyHitterEntry {
    int64_t index = 0;
    double estimate = 0.0;  // one-sided magnitude estimate (inflated)
};

/// Heavy-hitter map: each index at most once, at most floor(2/beta) entries,
/// sorted by estimate descending (ties by lower index).
using HeavyHitterMap = std::vector<HeavyHitterEntry>;

struct CsConfig {
    int depth = 3;
    int width = 64;
    double beta = 0.25;  // heaviness
    double eps = 0.2;    // precision
    double delta = 0.05; // error rate; must stay below eps
    int cert_quorum = 0; // rows that must agree for a certified entry; 0 = all

    int tracker_capacity() const;  // ceil(4/beta)
    /// Paper-formula sizing: width >= c_w/(eps^2 beta), depth >= c_d ln(n/delta).
    static CsConfig sized_for(double beta, double eps, double delta, size_t n,
                              double c_w = 8.0, double c_d = 3.0);
};

/// Linear CountSketch counter table with a bounded candidate tracker.
/// Row hashes derive deterministically from the table seed.
class CountSketchTable {
  public:
    CountSketchTable(const CsConfig& cfg, uint64_t seed);

    void update(int64_t index, int64_t delta);
    void update(const StreamUpdate& u) { update(u.index, u.delta); }

    /// Median over rows of the signed bucket counters.
    double query(int64_t index) const;

    /// Per-row signed estimates for one index.
    std::vector<double> query_rows(int64_t index) const;

    /// True when every row agrees with the median within max(eps*|med|, 0.5);
    /// disputed estimates are collision artifacts.
    bool certified(int64_t index, double eps, double* estimate = nullptr) const;

    /// (beta, eps)-cover extraction: candidates are re-queried, thresholded
    /// against the in-sketch residual-F2 estimate, inflated by (1 + eps/2)
    /// and pruned to floor(2/beta) entries.
    HeavyHitterMap heavy_hitters() const;
    HeavyHitterMap heavy_hitters(double beta, double eps) const;

    /// Counter-wise addition; requires identical config and seed. The
    /// candidate tracker is re-derived from the merged counters.
    void merge(const CountSketchTable& other);

    /// Estimated residual F2 after removing the given indices' buckets,
    /// median across rows, rescaled for the excluded bucket fraction.
    double residual_f2(const std::vector<int64_t>& exclude) const;

    const CsConfig& config() const { return cfg_; }
    uint64_t seed() const { return seed_; }
    size_t counter_count() const { return counters_.size(); }
    bool touched() const { return touched_; }
    std::vector<int64_t> tracked_candidates() const;

  private:
    uint64_t row_hash(int row, int64_t index) const;
    int bucket(int row, int64_t index) const;
    int sign(int row, int64_t index) const;
    void tracker_place(int64_t index, double estimate);

    CsConfig cfg_;
    uint64_t seed_;
    std::vector<int64_t> counters_;  // depth x width
    // Probed candidate cache: capacity ceil(4/beta), approximate top set.
    struct Slot {
        int64_t index = -1;
        double estimate = 0.0;
    };
    std::vector<Slot> tracker_;
    bool touched_ = false;
};

}  // namespace symnorm

#endif
