#ifndef SYMNORM_LEVEL_VECTOR_HPP
#define SYMNORM_LEVEL_VECTOR_HPP

#include <cstdint>
#include <vector>

#include "symnorm/stream.hpp"
#include "symnorm/views.hpp"

namespace symnorm {

/// Succinct level representation of a vector: level i (1-based) counts the
/// coordinates with magnitude in [base^(i-1), base^i).
struct LevelVector {
    double base = 2.0;
    std::vector<int64_t> counts;  // counts[i-1] holds level i

    size_t levels() const { return counts.size(); }
    int64_t total() const;
};

/// Number of levels needed to cover magnitudes up to `m`:
/// t = ceil(log_base m) + 1, so m itself falls in level t.
size_t level_count_for(uint64_t m, double base);

/// 1-based level of a positive magnitude; boundaries are half-open [lo, hi).
/// `powers` must hold base^0..; see level_powers().
size_t level_of(double magnitude, const std::vector<double>& powers);

std::vector<double> level_powers(double base, size_t count);

/// Exact level vector of a frequency vector. Zero coordinates land in no
/// level. Requires base > 1.
LevelVector exact_level_vector(const FrequencyVector& v, double base);

/// Coordinate-query view of the materialized level vector: the i-th bucket
/// holds counts[i-1] copies of base^i, remaining coordinates are zero.
/// Throws std::invalid_argument when the counts exceed dim.
class LevelVectorView final : public VecView {
  public:
    LevelVectorView(const LevelVector& lv, size_t dim);

    size_t dim() const override { return dim_; }
    double at(size_t i) const override;

  private:
    std::vector<int64_t> prefix_;  // cumulative counts
    std::vector<double> values_;   // base^i per level
    size_t dim_;
};

/// Dense materialization for test-scale dims.
std::vector<double> dense_materialize(const LevelVector& lv, size_t dim);

}  // namespace symnorm

#endif
