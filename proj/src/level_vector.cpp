#include "symnorm/level_vector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symnorm {

int64_t LevelVector::total() const {
    return std::accumulate(counts.begin(), counts.end(), int64_t{0});
}

size_t level_count_for(uint64_t m, double base) {
    if (base <= 1.0) throw std::invalid_argument("level base must exceed 1");
    if (m == 0) return 1;
    double t = std::ceil(std::log(static_cast<double>(m)) / std::log(base)) + 1.0;
    size_t levels = static_cast<size_t>(std::max(1.0, t));
    // Guard against boundary rounding: level `levels` must contain m.
    while (std::pow(base, static_cast<double>(levels) - 1.0) > static_cast<double>(m))
        --levels;
    while (std::pow(base, static_cast<double>(levels)) <= static_cast<double>(m))
        ++levels;
    return levels;
}

std::vector<double> level_powers(double base, size_t count) {
    std::vector<double> p(count + 1);
    p[0] = 1.0;
    for (size_t i = 1; i <= count; ++i) p[i] = p[i - 1] * base;
    return p;
}

size_t level_of(double magnitude, const std::vector<double>& powers) {
    // powers[i-1] <= magnitude < powers[i] picks level i.
    auto it = std::upper_bound(powers.begin(), powers.end(), magnitude);
    size_t i = static_cast<size_t>(it - powers.begin());
    if (i == 0) i = 1;
    return i;
}

LevelVector exact_level_vector(const FrequencyVector& v, double base) {
    if (base <= 1.0) throw std::invalid_argument("level base must exceed 1");
    LevelVector lv;
    lv.base = base;
    size_t t = level_count_for(v.magnitude_bound(), base);
    lv.counts.assign(t, 0);
    auto powers = level_powers(base, t);
    for (size_t i = 0; i < v.dim(); ++i) {
        int64_t val = v.at(i);
        if (val == 0) continue;
        double mag = std::abs(static_cast<double>(val));
        size_t lvl = level_of(mag, powers);
        if (lvl > t) throw std::overflow_error("magnitude above configured bound");
        ++lv.counts[lvl - 1];
    }
    return lv;
}

LevelVectorView::LevelVectorView(const LevelVector& lv, size_t dim) : dim_(dim) {
    int64_t running = 0;
    prefix_.reserve(lv.counts.size());
    values_.reserve(lv.counts.size());
    double power = 1.0;
    for (size_t i = 0; i < lv.counts.size(); ++i) {
        power *= lv.base;
        if (lv.counts[i] < 0) throw std::invalid_argument("negative level count");
        if (lv.counts[i] == 0) continue;
        running += lv.counts[i];
        prefix_.push_back(running);
        values_.push_back(power);
    }
    if (running > static_cast<int64_t>(dim))
        throw std::invalid_argument("level counts exceed dimension");
}

double LevelVectorView::at(size_t i) const {
    if (i >= dim_) return 0.0;
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), static_cast<int64_t>(i));
    if (it == prefix_.end()) return 0.0;
    return values_[static_cast<size_t>(it - prefix_.begin())];
}

std::vector<double> dense_materialize(const LevelVector& lv, size_t dim) {
    LevelVectorView view(lv, dim);
    return to_dense(view);
}

}  // namespace symnorm
