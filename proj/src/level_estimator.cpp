#include "symnorm/level_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "symnorm/seeds.hpp"

namespace symnorm {

using seeds::derive;
using seeds::label;

double level_count_from_hit_rate(double eta, int phi) {
    if (eta <= 0.0) return 0.0;
    if (phi <= 0) {
        // p = 1 keeps every item, so a real level hits in (almost) every
        // repetition; sporadic hits are collision noise, not items.
        return eta >= 0.45 ? 1.0 : 0.0;
    }
    if (eta >= 1.0) return std::numeric_limits<double>::infinity();
    double p = std::exp2(static_cast<double>(-phi));
    return std::log1p(-eta) / std::log1p(-p);
}

LevelVector LevelEstimate::rounded(size_t dim) const {
    LevelVector lv;
    lv.base = base;
    lv.counts.assign(counts.size(), 0);
    int64_t budget = static_cast<int64_t>(dim);
    for (size_t i = 0; i < counts.size(); ++i) {
        int64_t c = std::llround(counts[i]);
        c = std::max<int64_t>(0, std::min(c, budget));
        lv.counts[i] = c;
        budget -= c;
    }
    return lv;
}

LevelLab lab_from_json(const nlohmann::json& j) {
    LevelLab lab;
    lab.r_scale = j.value("r_scale", lab.r_scale);
    lab.r_floor = j.value("r_floor", lab.r_floor);
    lab.r_cap = j.value("r_cap", lab.r_cap);
    lab.d_override = j.value("d", lab.d_override);
    lab.w_override = j.value("w", lab.w_override);
    lab.w_kappa = j.value("w_kappa", lab.w_kappa);
    lab.w_floor = j.value("w_floor", lab.w_floor);
    lab.cert_quorum = j.value("cert_quorum", lab.cert_quorum);
    lab.block_override = j.value("block", lab.block_override);
    lab.beta_cs_floor = j.value("beta_cs_floor", lab.beta_cs_floor);
    lab.deflate_scale = j.value("deflate_scale", lab.deflate_scale);
    lab.threads = j.value("threads", lab.threads);
    return lab;
}

nlohmann::json lab_to_json(const LevelLab& lab) {
    return {{"r_scale", lab.r_scale},     {"r_floor", lab.r_floor},
            {"r_cap", lab.r_cap},         {"d", lab.d_override},
            {"w", lab.w_override},        {"w_kappa", lab.w_kappa},
            {"w_floor", lab.w_floor},     {"cert_quorum", lab.cert_quorum},
            {"block", lab.block_override},
            {"beta_cs_floor", lab.beta_cs_floor},
            {"deflate_scale", lab.deflate_scale},
            {"threads", lab.threads}};
}

SampleLevelParams derive_sample_params(size_t n, uint64_t m, double base_floor,
                                       double beta, double eps_cs, double delta,
                                       double c_R, double c_beta, double eps,
                                       int block, const LevelLab& lab) {
    if (n < 2) throw std::invalid_argument("need n >= 2");
    if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("beta in (0,1] required");
    double ln_n = std::log(static_cast<double>(n));
    double ln_inv_delta = std::log(1.0 / delta);

    SampleLevelParams p;
    p.n = n;
    p.phi_max = static_cast<int>(std::ceil(std::log2(static_cast<double>(n))));
    double r_raw = c_R * ln_inv_delta * ln_n * ln_n / (eps * eps) * lab.r_scale;
    p.reps = static_cast<int>(std::min<double>(lab.r_cap, std::max<double>(lab.r_floor,
                                                                           std::ceil(r_raw))));
    p.block = block;

    size_t t_size = level_count_for(m, base_floor);
    double beta_raw = c_beta * beta / (static_cast<double>(t_size) * ln_inv_delta);
    beta_raw = std::min(beta_raw, 1.0);
    double beta_eff = std::min(1.0, std::max(beta_raw, lab.beta_cs_floor));
    double delta_cs = delta / static_cast<double>(n);
    if (delta_cs >= eps_cs)
        throw std::invalid_argument("per-table error rate must stay below its precision");

    p.cs.beta = beta_eff;
    p.cs.eps = eps_cs;
    p.cs.delta = delta_cs;
    if (lab.w_override > 0) {
        p.cs.width = lab.w_override;
    } else if (lab.w_kappa > 0) {
        p.cs.width = static_cast<int>(
            std::max<double>(lab.w_floor, std::ceil(lab.w_kappa / beta_raw)));
    } else {
        p.cs.width = static_cast<int>(std::ceil(8.0 / (eps_cs * eps_cs * beta_raw)));
    }
    p.cs.depth = lab.d_override > 0
                     ? lab.d_override
                     : static_cast<int>(std::ceil(3.0 * std::log(n / delta_cs)));
    p.cs.cert_quorum = lab.cert_quorum;
    double counters = static_cast<double>(p.table_count()) * p.cs.depth * p.cs.width;
    if (counters > 1e9)
        throw std::invalid_argument("sketch would exceed 1e9 counters; scale down via lab");
    return p;
}

namespace {

struct Occupancy {
    std::vector<std::vector<int>> a;  // [phi][level]
    size_t levels;
};

// Shared estimation stage: threshold, deepest passing depth, hit rate, count.
void finish_estimate(LevelEstimate& le, const Occupancy& occ, int reps, double delta,
                     size_t n, double deflate) {
    double ln_n = std::log(static_cast<double>(n));
    double threshold = reps * std::log(1.0 / delta) / (100.0 * ln_n);
    le.occupancy_threshold = threshold;
    le.occupancy = occ.a;
    size_t t = occ.levels;
    le.counts.assign(t, 0.0);
    le.deepest_depth.assign(t, -1);
    le.hit_rate.assign(t, 0.0);
    for (size_t lvl = 0; lvl < t; ++lvl) {
        int q = -1;
        for (size_t phi = 0; phi < occ.a.size(); ++phi)
            if (occ.a[phi][lvl] >= threshold) q = static_cast<int>(phi);
        le.deepest_depth[lvl] = q;
        if (q < 0) continue;
        int hits = occ.a[static_cast<size_t>(q)][lvl];
        double eta = hits / (static_cast<double>(reps) * (1.0 + deflate));
        le.hit_rate[lvl] = eta;
        if (q == 0) {
            // At p = 1 a real level appears in essentially every repetition.
            le.counts[lvl] = hits >= reps / 2 ? 1.0 : 0.0;
        } else {
            le.counts[lvl] = level_count_from_hit_rate(eta, q);
        }
    }
}

}  // namespace

LevelEstimate estimate_levels_two_pass(std::span<const StreamUpdate> updates, size_t n,
                                       uint64_t m, const TwoPassConfig& cfg,
                                       uint64_t seed) {
    if (!(cfg.alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
    double eps_cs = cfg.eps / 2.0;
    auto params = derive_sample_params(n, m, cfg.alpha, cfg.beta, eps_cs, cfg.delta,
                                       cfg.c_R, cfg.c_beta, cfg.eps, 1, cfg.lab);
    SampleLevelSketch sk(params, derive(seed, {label("twopass")}));
    sk.ingest(updates, cfg.lab.threads);

    // Pass two: exact frequencies of every recovered index.
    std::vector<HeavyHitterMap> maps(params.table_count());
    {
        unsigned hw = cfg.lab.threads > 0
                          ? static_cast<unsigned>(cfg.lab.threads)
                          : std::max(1u, std::thread::hardware_concurrency());
        unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(params.phi_max) + 1);
        std::vector<std::future<void>> futs;
        for (unsigned wk = 0; wk < workers; ++wk)
            futs.push_back(std::async(std::launch::async, [&, wk] {
                for (int phi = static_cast<int>(wk); phi <= params.phi_max;
                     phi += static_cast<int>(workers))
                    for (int r = 0; r < params.reps; ++r)
                        maps[static_cast<size_t>(phi) * params.reps + r] =
                            sk.table(phi, r).heavy_hitters();
            }));
        for (auto& f : futs) f.get();
    }
    std::unordered_set<int64_t> recovered;
    for (const auto& hh : maps)
        for (const auto& e : hh) recovered.insert(e.index);
    std::unordered_map<int64_t, int64_t> exact;
    for (int64_t idx : recovered) exact[idx] = 0;
    for (const auto& u : updates) {
        auto it = exact.find(u.index);
        if (it != exact.end()) it->second += u.delta;
    }

    size_t t = level_count_for(m, cfg.alpha);
    auto powers = level_powers(cfg.alpha, t + 2);
    Occupancy occ;
    occ.levels = t + 2;
    occ.a.assign(static_cast<size_t>(params.phi_max) + 1,
                 std::vector<int>(occ.levels, 0));
    std::vector<char> seen(occ.levels);
    for (int phi = 0; phi <= params.phi_max; ++phi)
        for (int r = 0; r < params.reps; ++r) {
            const auto& hh = maps[static_cast<size_t>(phi) * params.reps + r];
            std::fill(seen.begin(), seen.end(), 0);
            for (const auto& e : hh) {
                int64_t v = exact[e.index];
                if (v == 0) continue;
                size_t lvl = level_of(std::abs(static_cast<double>(v)), powers);
                if (lvl <= occ.levels && !seen[lvl - 1]) {
                    seen[lvl - 1] = 1;
                    ++occ.a[static_cast<size_t>(phi)][lvl - 1];
                }
            }
        }

    LevelEstimate le;
    le.base = cfg.alpha;
    le.counter_count = sk.counter_count();
    finish_estimate(le, occ, params.reps, cfg.delta, n, cfg.lab.deflate_scale * cfg.eps);
    return le;
}

SampleLevelSketch make_level1_sketch(const Level1Config& cfg, size_t n, uint64_t m,
                                     uint64_t seed) {
    if (!(cfg.gamma > 0.0 && cfg.gamma < 1.0))
        throw std::invalid_argument("gamma must lie in (0,1)");
    double ln_n = std::log(static_cast<double>(n));
    double eps_cs = cfg.gamma * cfg.gamma / (8.0 * ln_n);
    int block = cfg.lab.block_override > 0
                    ? cfg.lab.block_override
                    : static_cast<int>(std::ceil(std::log(static_cast<double>(n) * n / cfg.delta)));
    // Sizing uses the smallest realizable base 1 + gamma/2 (largest t).
    auto params = derive_sample_params(n, m, 1.0 + cfg.gamma / 2.0, cfg.beta, eps_cs,
                                       cfg.delta, cfg.c_R, cfg.c_beta, cfg.eps, block,
                                       cfg.lab);
    return SampleLevelSketch(params, derive(seed, {label("level1")}));
}

LevelEstimate level1_finalize(const SampleLevelSketch& sk, const Level1Config& cfg,
                              size_t n, uint64_t m, uint64_t seed) {
    double x;
    if (cfg.x_override) {
        x = *cfg.x_override;
        if (!(x >= 0.5 && x <= 1.0))
            throw std::invalid_argument("x must lie in [1/2, 1]");
    } else {
        uint64_t bits = derive(seed, {label("xdraw")});
        x = 0.5 + 0.5 * (static_cast<double>(bits >> 11) * 0x1.0p-53);
    }
    double alpha = 1.0 + x * cfg.gamma;
    double ln_n = std::log(static_cast<double>(n));
    double eps_cs = cfg.gamma * cfg.gamma / (8.0 * ln_n);

    const auto& params = sk.params();
    size_t t = level_count_for(m, alpha);
    auto powers = level_powers(alpha, t + 3);
    double log_alpha = std::log(alpha);

    Occupancy occ;
    occ.levels = t + 3;
    occ.a.assign(static_cast<size_t>(params.phi_max) + 1,
                 std::vector<int>(occ.levels, 0));

    LevelEstimate le;
    le.base = alpha;
    le.x = x;
    le.counter_count = sk.counter_count();

    std::vector<int64_t> discarded_per_phi(static_cast<size_t>(params.phi_max) + 1, 0);
    std::vector<int64_t> empty_per_phi(static_cast<size_t>(params.phi_max) + 1, 0);
    auto scan_phi = [&](int phi) {
        std::vector<char> seen(occ.levels);
        std::vector<HeavyHitterEntry> entries;
        for (int blk = 0; blk < params.reps; ++blk) {
            bool chosen = false;
            for (int l = 0; l < params.block && !chosen; ++l) {
                int rep = blk * params.block + l;
                auto hh = sk.table(phi, rep).heavy_hitters();
                // Process in increasing estimate order; one ambiguous
                // classification discards the whole map.
                entries.assign(hh.rbegin(), hh.rend());
                std::fill(seen.begin(), seen.end(), 0);
                bool discard = false;
                for (const auto& e : entries) {
                    if (e.estimate <= 0.0) continue;
                    int w = static_cast<int>(
                        std::ceil(std::log(e.estimate) / log_alpha - 1e-12));
                    if (w > static_cast<int>(occ.levels)) w = static_cast<int>(occ.levels);
                    // Levels 0 and 1 merge: any estimate at most alpha' can
                    // only come from magnitude 1, so no ambiguity test there.
                    if (w < 1) w = 1;
                    else if (w > 1 &&
                             powers[static_cast<size_t>(w) - 1] >=
                                 e.estimate / (1.0 + eps_cs)) {
                        discard = true;
                        break;
                    }
                    seen[static_cast<size_t>(w) - 1] = 1;
                }
                if (discard) {
                    ++discarded_per_phi[static_cast<size_t>(phi)];
                    continue;
                }
                chosen = true;
                for (size_t lvl = 0; lvl < occ.levels; ++lvl)
                    if (seen[lvl]) ++occ.a[static_cast<size_t>(phi)][lvl];
            }
            if (!chosen) ++empty_per_phi[static_cast<size_t>(phi)];
        }
    };
    {
        unsigned hw = cfg.lab.threads > 0
                          ? static_cast<unsigned>(cfg.lab.threads)
                          : std::max(1u, std::thread::hardware_concurrency());
        unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(params.phi_max) + 1);
        if (workers <= 1) {
            for (int phi = 0; phi <= params.phi_max; ++phi) scan_phi(phi);
        } else {
            std::vector<std::future<void>> futs;
            for (unsigned wk = 0; wk < workers; ++wk)
                futs.push_back(std::async(std::launch::async, [&, wk] {
                    for (int phi = static_cast<int>(wk); phi <= params.phi_max;
                         phi += static_cast<int>(workers))
                        scan_phi(phi);
                }));
            for (auto& f : futs) f.get();
        }
    }
    for (size_t i = 0; i < discarded_per_phi.size(); ++i) {
        le.discarded_maps += discarded_per_phi[i];
        le.empty_blocks += empty_per_phi[i];
    }

    finish_estimate(le, occ, params.reps, cfg.delta, n, cfg.lab.deflate_scale * cfg.eps);
    return le;
}

LevelEstimate run_level1(std::span<const StreamUpdate> updates, size_t n, uint64_t m,
                         const Level1Config& cfg, uint64_t seed) {
    SampleLevelSketch sk = make_level1_sketch(cfg, n, m, seed);
    sk.ingest(updates, cfg.lab.threads);
    return level1_finalize(sk, cfg, n, m, seed);
}

nlohmann::json level_estimate_to_json(const LevelEstimate& le, bool include_occupancy) {
    nlohmann::json j{{"base", le.base},
                     {"x", le.x},
                     {"counts", le.counts},
                     {"q", le.deepest_depth},
                     {"hit_rate", le.hit_rate},
                     {"occupancy_threshold", le.occupancy_threshold},
                     {"counter_count", le.counter_count},
                     {"discarded_maps", le.discarded_maps},
                     {"empty_blocks", le.empty_blocks}};
    if (include_occupancy) j["occupancy"] = le.occupancy;
    return j;
}

}  // namespace symnorm
