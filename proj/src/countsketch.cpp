#include "symnorm/countsketch.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "symnorm/seeds.hpp"

namespace symnorm {

using seeds::combine;
using seeds::derive;
using seeds::label;

int CsConfig::tracker_capacity() const {
    return static_cast<int>(std::ceil(4.0 / beta));
}

CsConfig CsConfig::sized_for(double beta, double eps, double delta, size_t n,
                             double c_w, double c_d) {
    if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("beta in (0,1] required");
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("eps in (0,1) required");
    if (!(delta < eps)) throw std::invalid_argument("requires delta < eps");
    CsConfig cfg;
    cfg.beta = beta;
    cfg.eps = eps;
    cfg.delta = delta;
    cfg.width = static_cast<int>(std::ceil(c_w / (eps * eps * beta)));
    cfg.depth = static_cast<int>(std::ceil(c_d * std::log(static_cast<double>(n) / delta)));
    return cfg;
}

CountSketchTable::CountSketchTable(const CsConfig& cfg, uint64_t seed)
    : cfg_(cfg), seed_(seed) {
    if (cfg.depth < 1 || cfg.width < 1)
        throw std::invalid_argument("table needs positive depth and width");
    if (!(cfg.beta > 0 && cfg.beta <= 1))
        throw std::invalid_argument("beta in (0,1] required");
    counters_.assign(static_cast<size_t>(cfg.depth) * cfg.width, 0);
}

// One hash per (row, index): low bits pick the bucket, the top bit the sign.
uint64_t CountSketchTable::row_hash(int row, int64_t index) const {
    return combine(combine(seed_, 0x42u + static_cast<uint64_t>(row)),
                   static_cast<uint64_t>(index));
}

int CountSketchTable::bucket(int row, int64_t index) const {
    return static_cast<int>((row_hash(row, index) & 0xFFFFFFFFu) %
                            static_cast<uint64_t>(cfg_.width));
}

int CountSketchTable::sign(int row, int64_t index) const {
    return (row_hash(row, index) >> 63) ? 1 : -1;
}

namespace {

double median_of(std::vector<double>& vals) {
    auto mid = vals.begin() + static_cast<long>(vals.size() / 2);
    std::nth_element(vals.begin(), mid, vals.end());
    if (vals.size() % 2 == 0) {
        double lo = *std::max_element(vals.begin(), mid);
        return 0.5 * (lo + *mid);
    }
    return *mid;
}

}  // namespace

void CountSketchTable::update(int64_t index, int64_t delta) {
    thread_local std::vector<double> vals;
    vals.clear();
    for (int r = 0; r < cfg_.depth; ++r) {
        uint64_t h = row_hash(r, index);
        size_t pos = static_cast<size_t>(r) * cfg_.width +
                     static_cast<size_t>((h & 0xFFFFFFFFu) % static_cast<uint64_t>(cfg_.width));
        int s = (h >> 63) ? 1 : -1;
        counters_[pos] += s * delta;
        vals.push_back(static_cast<double>(s * counters_[pos]));
    }
    touched_ = true;
    tracker_place(index, std::abs(median_of(vals)));
}

double CountSketchTable::query(int64_t index) const {
    thread_local std::vector<double> vals;
    vals.clear();
    for (int r = 0; r < cfg_.depth; ++r) {
        uint64_t h = row_hash(r, index);
        size_t pos = static_cast<size_t>(r) * cfg_.width +
                     static_cast<size_t>((h & 0xFFFFFFFFu) % static_cast<uint64_t>(cfg_.width));
        int s = (h >> 63) ? 1 : -1;
        vals.push_back(static_cast<double>(s) * static_cast<double>(counters_[pos]));
    }
    return median_of(vals);
}

void CountSketchTable::tracker_place(int64_t index, double est) {
    if (tracker_.empty())
        tracker_.resize(static_cast<size_t>(cfg_.tracker_capacity()));
    uint64_t h = combine(seed_ ^ 0x534c4f54u, static_cast<uint64_t>(index));
    int probes = std::min<size_t>(4, tracker_.size());
    size_t weakest = static_cast<size_t>(h % tracker_.size());
    for (int p = 0; p < probes; ++p) {
        size_t pos = (h + static_cast<uint64_t>(p)) % tracker_.size();
        if (tracker_[pos].index == index) {
            tracker_[pos].estimate = est;
            return;
        }
        if (tracker_[pos].index < 0) {
            tracker_[pos] = {index, est};
            return;
        }
        if (tracker_[pos].estimate < tracker_[weakest].estimate) weakest = pos;
    }
    if (est >= tracker_[weakest].estimate) tracker_[weakest] = {index, est};
}

std::vector<int64_t> CountSketchTable::tracked_candidates() const {
    std::vector<int64_t> out;
    for (const auto& s : tracker_)
        if (s.index >= 0) out.push_back(s.index);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double CountSketchTable::residual_f2(const std::vector<int64_t>& exclude) const {
    std::vector<double> per_row;
    std::vector<char> marked(static_cast<size_t>(cfg_.width));
    for (int r = 0; r < cfg_.depth; ++r) {
        std::fill(marked.begin(), marked.end(), 0);
        for (int64_t idx : exclude) marked[static_cast<size_t>(bucket(r, idx))] = 1;
        int open = 0;
        double sum = 0.0;
        for (int b = 0; b < cfg_.width; ++b) {
            if (marked[static_cast<size_t>(b)]) continue;
            ++open;
            double c = static_cast<double>(counters_[static_cast<size_t>(r) * cfg_.width + b]);
            sum += c * c;
        }
        if (open == 0) continue;
        per_row.push_back(sum * static_cast<double>(cfg_.width) / open);
    }
    if (per_row.empty()) return 0.0;
    return median_of(per_row);
}

std::vector<double> CountSketchTable::query_rows(int64_t index) const {
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(cfg_.depth));
    for (int r = 0; r < cfg_.depth; ++r) {
        uint64_t h = row_hash(r, index);
        size_t pos = static_cast<size_t>(r) * cfg_.width +
                     static_cast<size_t>((h & 0xFFFFFFFFu) % static_cast<uint64_t>(cfg_.width));
        int s = (h >> 63) ? 1 : -1;
        vals.push_back(static_cast<double>(s) * static_cast<double>(counters_[pos]));
    }
    return vals;
}

bool CountSketchTable::certified(int64_t index, double eps, double* estimate) const {
    auto rows = query_rows(index);
    std::vector<double> sorted = rows;
    double med = median_of(sorted);
    double band = std::max(eps * std::abs(med), 0.5);
    int quorum = cfg_.cert_quorum > 0 ? cfg_.cert_quorum : cfg_.depth;
    // The median is only trustworthy when a strict majority agrees.
    quorum = std::max(quorum, cfg_.depth / 2 + 1);
    int agree = 0;
    for (double v : rows) agree += std::abs(v - med) <= band;
    if (agree < quorum) return false;
    if (estimate) *estimate = std::abs(med);
    return true;
}

HeavyHitterMap CountSketchTable::heavy_hitters() const {
    return heavy_hitters(cfg_.beta, cfg_.eps);
}

HeavyHitterMap CountSketchTable::heavy_hitters(double beta, double eps) const {
    struct Raw {
        int64_t index;
        double est;
    };
    std::vector<Raw> raws;
    for (int64_t idx : tracked_candidates()) {
        // Keep only entries whose rows agree: a disputed estimate came from
        // collisions and cannot certify the cover's accuracy side.
        double est = 0.0;
        if (certified(idx, eps, &est) && est > 0.0) raws.push_back({idx, est});
    }
    std::sort(raws.begin(), raws.end(), [](const Raw& a, const Raw& b) {
        if (a.est != b.est) return a.est > b.est;
        return a.index < b.index;
    });

    // Residual tail with the top floor(1/beta) candidates' buckets removed.
    size_t top = static_cast<size_t>(std::floor(1.0 / beta));
    std::vector<int64_t> exclude;
    for (size_t i = 0; i < raws.size() && i < top; ++i) exclude.push_back(raws[i].index);
    double tail = residual_f2(exclude);
    double threshold_sq = beta * tail;

    HeavyHitterMap out;
    size_t cap = static_cast<size_t>(std::floor(2.0 / beta));
    for (const auto& r : raws) {
        if (out.size() >= cap) break;
        if (r.est * r.est < threshold_sq) continue;
        out.push_back({r.index, (1.0 + eps / 2.0) * r.est});
    }
    return out;
}

void CountSketchTable::merge(const CountSketchTable& other) {
    if (other.cfg_.depth != cfg_.depth || other.cfg_.width != cfg_.width ||
        other.seed_ != seed_)
        throw std::invalid_argument("merge requires identically seeded tables");
    for (size_t i = 0; i < counters_.size(); ++i) counters_[i] += other.counters_[i];
    touched_ = touched_ || other.touched_;
    // Re-derive the tracker against the merged counters.
    auto mine = tracked_candidates();
    auto theirs = other.tracked_candidates();
    mine.insert(mine.end(), theirs.begin(), theirs.end());
    std::sort(mine.begin(), mine.end());
    mine.erase(std::unique(mine.begin(), mine.end()), mine.end());
    std::vector<std::pair<double, int64_t>> scored;
    for (int64_t idx : mine) scored.emplace_back(std::abs(query(idx)), idx);
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    tracker_.assign(tracker_.empty() ? static_cast<size_t>(cfg_.tracker_capacity())
                                     : tracker_.size(),
                    Slot{});
    for (const auto& [est, idx] : scored) tracker_place(idx, est);
}

}  // namespace symnorm
