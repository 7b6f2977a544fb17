#include "symnorm/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>

#include "symnorm/seeds.hpp"

namespace symnorm {

using seeds::derive;
using seeds::label;

const ProfileRow& ConcentrationProfile::row_for(size_t k) const {
    for (const auto& r : rows)
        if (r.k == k) return r;
    throw std::out_of_range("no profile row for requested dimension");
}

double estimate_median(const SymmetricNorm& l, size_t k, size_t samples, uint64_t seed) {
    if (k < 1) throw std::invalid_argument("dimension must be >= 1");
    if (samples < 100) throw std::invalid_argument("need at least 100 samples");
    std::mt19937_64 rng(derive(seed, {label("sphere"), k}));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> x(k);
    std::vector<double> vals(samples);
    for (size_t s = 0; s < samples; ++s) {
        double norm_sq = 0.0;
        for (size_t i = 0; i < k; ++i) {
            x[i] = gauss(rng);
            norm_sq += x[i] * x[i];
        }
        double inv = 1.0 / std::sqrt(norm_sq);
        for (size_t i = 0; i < k; ++i) x[i] *= inv;
        vals[s] = l.evaluate_dense(x);
    }
    auto mid = vals.begin() + static_cast<long>(samples / 2);
    std::nth_element(vals.begin(), mid, vals.end());
    double hi = *mid;
    if (samples % 2 == 0) {
        double lo = *std::max_element(vals.begin(), mid);
        return 0.5 * (lo + hi);
    }
    return hi;
}

namespace {

// Hill climb on the nonnegative sphere from a starting point; accepts mass
// transfers between coordinate pairs that increase the norm.
double ascent_refine(const SymmetricNorm& l, std::vector<double> x, double best,
                     uint64_t seed) {
    size_t k = x.size();
    if (k < 2) return best;
    std::mt19937_64 rng(derive(seed, {label("ascent"), k}));
    std::uniform_int_distribution<size_t> pick(0, k - 1);
    double step = 0.25;
    std::vector<double> y(k);
    for (int iter = 0; iter < 400; ++iter) {
        size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        y = x;
        y[i] += step * (x[j] + 1.0 / std::sqrt(static_cast<double>(k)));
        y[j] = std::max(0.0, y[j] - step * x[j]);
        double norm_sq = 0.0;
        for (double v : y) norm_sq += v * v;
        double inv = 1.0 / std::sqrt(norm_sq);
        for (double& v : y) v *= inv;
        double val = l.evaluate_dense(y);
        if (val > best) {
            best = val;
            x = y;
        } else {
            step *= 0.995;
        }
    }
    return best;
}

}  // namespace

double estimate_max(const SymmetricNorm& l, size_t k, bool* heuristic, uint64_t seed) {
    if (k < 1) throw std::invalid_argument("dimension must be >= 1");
    if (auto cf = l.closed_form_max(k)) {
        if (heuristic) *heuristic = false;
        return *cf;
    }
    if (heuristic) *heuristic = true;
    double best = 0.0;
    size_t best_j = 1;
    // Full flat-family scan at desk scale, geometric beyond that.
    if (k <= 8192) {
        for (size_t j = 1; j <= k; ++j) {
            double v = l.evaluate_flat(j);
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
    } else {
        for (size_t j = 1; j <= k; j = std::max(j + 1, j * 2)) {
            double v = l.evaluate_flat(j);
            if (v > best) {
                best = v;
                best_j = j;
            }
        }
        double v = l.evaluate_flat(k);
        if (v > best) {
            best = v;
            best_j = k;
        }
    }
    std::vector<double> x(k, 0.0);
    double coord = 1.0 / std::sqrt(static_cast<double>(best_j));
    for (size_t i = 0; i < best_j; ++i) x[i] = coord;
    return ascent_refine(l, std::move(x), best, seed);
}

std::vector<size_t> dimension_grid(size_t n, size_t grid_size) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    std::vector<size_t> ks;
    if (grid_size == 0) {
        for (size_t k = 1; k < n; k *= 2) ks.push_back(k);
        ks.push_back(n);
    } else {
        double ratio = std::pow(static_cast<double>(n), 1.0 / std::max<size_t>(1, grid_size - 1));
        double v = 1.0;
        for (size_t i = 0; i < grid_size; ++i) {
            ks.push_back(static_cast<size_t>(std::lround(v)));
            v *= ratio;
        }
        ks.push_back(n);
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    if (ks.front() != 1) ks.insert(ks.begin(), 1);
    if (ks.back() != n) ks.push_back(n);
    return ks;
}

ConcentrationProfile compute_mmc(const SymmetricNorm& l, size_t n, size_t grid_size,
                                 size_t samples, uint64_t seed, int threads) {
    auto ks = dimension_grid(n, grid_size);
    ConcentrationProfile p;
    p.norm_name = l.name();
    p.n = n;
    p.samples_per_k = samples;
    p.seed = seed;
    p.rows.resize(ks.size());

    unsigned hw = threads > 0 ? static_cast<unsigned>(threads)
                              : std::max(1u, std::thread::hardware_concurrency());
    auto work = [&](size_t idx) {
        size_t k = ks[idx];
        ProfileRow row;
        row.k = k;
        row.median = estimate_median(l, k, samples, derive(seed, {label("median"), k}));
        row.max_value = estimate_max(l, k, &row.heuristic_max, derive(seed, {label("max"), k}));
        row.mc = row.max_value / row.median;
        p.rows[idx] = row;
    };
    if (hw <= 1) {
        for (size_t i = 0; i < ks.size(); ++i) work(i);
    } else {
        std::vector<std::future<void>> futs;
        for (size_t i = 0; i < ks.size(); ++i)
            futs.push_back(std::async(std::launch::async, work, i));
        for (auto& f : futs) f.get();
    }
    for (const auto& row : p.rows) {
        p.max_mc = std::max(p.max_mc, row.mc);
        p.any_heuristic = p.any_heuristic || row.heuristic_max;
    }
    return p;
}

nlohmann::json profile_to_json(const ConcentrationProfile& p) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : p.rows)
        rows.push_back({{"k", r.k},
                        {"median", r.median},
                        {"max", r.max_value},
                        {"heuristic_max", r.heuristic_max},
                        {"mc", r.mc}});
    return {{"norm", p.norm_name},
            {"n", p.n},
            {"samples_per_k", p.samples_per_k},
            {"seed", p.seed},
            {"rows", rows},
            {"mmc", p.max_mc},
            {"any_heuristic", p.any_heuristic}};
}

ConcentrationProfile profile_from_json(const nlohmann::json& j) {
    ConcentrationProfile p;
    p.norm_name = j.at("norm").get<std::string>();
    p.n = j.at("n").get<size_t>();
    p.samples_per_k = j.at("samples_per_k").get<size_t>();
    p.seed = j.at("seed").get<uint64_t>();
    for (const auto& r : j.at("rows")) {
        ProfileRow row;
        row.k = r.at("k").get<size_t>();
        row.median = r.at("median").get<double>();
        row.max_value = r.at("max").get<double>();
        row.heuristic_max = r.at("heuristic_max").get<bool>();
        row.mc = r.at("mc").get<double>();
        p.rows.push_back(row);
    }
    p.max_mc = j.at("mmc").get<double>();
    p.any_heuristic = j.at("any_heuristic").get<bool>();
    return p;
}

}  // namespace symnorm
