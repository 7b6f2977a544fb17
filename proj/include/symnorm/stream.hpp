#ifndef SYMNORM_STREAM_HPP
#define SYMNORM_STREAM_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace symnorm {

/// One turnstile update: signed delta applied to a coordinate.
struct StreamUpdate {
    int64_t index = 0;
    int64_t delta = 0;

    bool operator==(const StreamUpdate&) const = default;
};

/// Default magnitude bound m = n^3 (configurable poly(n) cap on |v_i|).
uint64_t default_magnitude_bound(size_t n);

/// Exact ground-truth accumulator for a turnstile stream.
class FrequencyVector {
  public:
    explicit FrequencyVector(size_t n, uint64_t magnitude_bound = 0);

    size_t dim() const { return values_.size(); }
    uint64_t magnitude_bound() const { return bound_; }
    int64_t at(size_t i) const { return values_[i]; }
    const std::vector<int64_t>& values() const { return values_; }

    /// Applies one update. Throws std::out_of_range on a bad index and
    /// std::overflow_error when the magnitude bound would be exceeded.
    void apply(const StreamUpdate& u);
    void apply_all(std::span<const StreamUpdate> updates);

    size_t nonzero_count() const;
    /// Coordinate magnitudes as doubles (norm-oracle input).
    std::vector<double> abs_values() const;

  private:
    std::vector<int64_t> values_;
    uint64_t bound_;
};

/// Replays a full stream into a fresh vector (the brute-force oracle).
FrequencyVector replay(std::span<const StreamUpdate> updates, size_t n,
                       uint64_t magnitude_bound = 0);

/// Stream file format: one `<index> <delta>` per line, `#` starts a comment.
std::vector<StreamUpdate> read_stream(std::istream& in);
std::vector<StreamUpdate> read_stream_file(const std::string& path);
void write_stream(std::ostream& out, std::span<const StreamUpdate> updates);
void write_stream_file(const std::string& path, std::span<const StreamUpdate> updates);

}  // namespace symnorm

#endif
