#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "symnorm/countsketch.hpp"
#include "symnorm/seeds.hpp"

using namespace symnorm;

namespace {

CsConfig small_cfg(int d = 5, int w = 32, double beta = 0.25, double eps = 0.2) {
    CsConfig cfg;
    cfg.depth = d;
    cfg.width = w;
    cfg.beta = beta;
    cfg.eps = eps;
    cfg.delta = 0.05;
    return cfg;
}

}  // namespace

TEST_CASE("single item queries are exact") {
    CountSketchTable t(small_cfg(), 1);
    t.update(3, 5);
    CHECK(t.query(3) == doctest::Approx(5.0));
    t.update(3, -5);
    CHECK(t.query(3) == doctest::Approx(0.0));
    CHECK(t.query(11) == doctest::Approx(0.0));  // never-updated index
}

TEST_CASE("updates are linear: negated stream restores all counters") {
    CountSketchTable t(small_cfg(), 2);
    std::mt19937_64 rng(4);
    std::vector<StreamUpdate> ups;
    for (int i = 0; i < 200; ++i)
        ups.push_back({static_cast<int64_t>(rng() % 64), static_cast<int64_t>(rng() % 21) - 10});
    for (const auto& u : ups) t.update(u);
    for (const auto& u : ups) t.update(u.index, -u.delta);
    for (int i = 0; i < 64; ++i) CHECK(t.query(i) == doctest::Approx(0.0));
}

TEST_CASE("merge of identically seeded tables equals the concatenated stream") {
    CsConfig cfg = small_cfg();
    CountSketchTable a(cfg, 7), b(cfg, 7), whole(cfg, 7);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 300; ++i) {
        StreamUpdate u{static_cast<int64_t>(rng() % 128),
                       static_cast<int64_t>(rng() % 11) - 5};
        if (i % 2 == 0) a.update(u);
        else b.update(u);
        whole.update(u);
    }
    a.merge(b);
    for (int i = 0; i < 128; ++i) CHECK(a.query(i) == doctest::Approx(whole.query(i)));

    CountSketchTable other(cfg, 8);
    CHECK_THROWS_AS(a.merge(other), std::invalid_argument);
}

TEST_CASE("query error respects the residual-F2 bound across seeds") {
    // |estimate - v_i| <= sqrt(8 T / w) with T the residual F2, checked
    // empirically over 500 seeds at n = 200, d = 7, w = 64.
    const size_t n = 200;
    std::mt19937_64 rng(11);
    std::vector<int64_t> vals(n);
    for (auto& v : vals) v = static_cast<int64_t>(rng() % 21) - 10;
    double f2 = 0;
    for (auto v : vals) f2 += static_cast<double>(v) * v;

    int violations = 0, checks = 0;
    for (uint64_t seed = 0; seed < 500; ++seed) {
        CountSketchTable t(small_cfg(7, 64, 0.25, 0.2), seed);
        for (size_t i = 0; i < n; ++i)
            if (vals[i]) t.update(static_cast<int64_t>(i), vals[i]);
        for (size_t i = 0; i < n; i += 17) {
            double T = f2 - static_cast<double>(vals[i]) * vals[i];
            double err = std::abs(t.query(static_cast<int64_t>(i)) - vals[i]);
            ++checks;
            if (err > std::sqrt(8.0 * T / 64.0)) ++violations;
        }
    }
    CHECK(static_cast<double>(violations) / checks <= 0.05);
}

TEST_CASE("queries are unbiased over sign-hash randomness") {
    const size_t n = 32;
    std::mt19937_64 rng(13);
    std::vector<int64_t> vals(n);
    for (auto& v : vals) v = static_cast<int64_t>(rng() % 9) - 4;
    vals[5] = 7;

    const int seeds = 10000;
    double sum = 0, sum_sq = 0;
    for (uint64_t s = 0; s < seeds; ++s) {
        CountSketchTable t(small_cfg(3, 16, 0.5, 0.2), s);
        for (size_t i = 0; i < n; ++i)
            if (vals[i]) t.update(static_cast<int64_t>(i), vals[i]);
        double err = t.query(5) - 7.0;
        sum += err;
        sum_sq += err * err;
    }
    double mean = sum / seeds;
    double se = std::sqrt((sum_sq / seeds - mean * mean) / seeds);
    CHECK(std::abs(mean) <= 3.0 * std::max(se, 1e-12));
}

TEST_CASE("heavy hitter map: spike over no residual") {
    CsConfig cfg = small_cfg(5, 64, 0.1, 0.2);
    CountSketchTable t(cfg, 3);
    t.update(7, 100);
    auto hh = t.heavy_hitters();
    REQUIRE(hh.size() == 1);
    CHECK(hh[0].index == 7);
    CHECK(hh[0].estimate >= 100.0);
    CHECK(hh[0].estimate <= 100.0 * 1.2);
}

TEST_CASE("heavy hitter map capacity at beta = 1") {
    CsConfig cfg = small_cfg(5, 64, 1.0, 0.2);
    CountSketchTable t(cfg, 5);
    for (int i = 0; i < 10; ++i) t.update(i, 50 + i);
    auto hh = t.heavy_hitters();
    CHECK(hh.size() <= 2);
}

TEST_CASE("planted spike is recovered against noise in nearly all seeds") {
    const size_t n = 200;
    const double beta = 0.25, eps = 0.2;
    int recovered = 0;
    const int trials = 200;
    for (int trial = 0; trial < trials; ++trial) {
        std::mt19937_64 rng(seeds::derive(99, {static_cast<uint64_t>(trial)}));
        std::vector<int64_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        CountSketchTable t(small_cfg(7, 64, beta, eps),
                           seeds::derive(7, {static_cast<uint64_t>(trial)}));
        t.update(idx[0], (rng() & 1) ? 50 : -50);
        for (int i = 1; i <= 100; ++i) t.update(idx[i], (rng() & 1) ? 1 : -1);
        auto hh = t.heavy_hitters();
        for (const auto& e : hh) recovered += e.index == idx[0];
    }
    CHECK(static_cast<double>(recovered) / trials >= 0.95);
}

TEST_CASE("paper-formula sizing and the delta < eps guard") {
    CsConfig cfg = CsConfig::sized_for(0.25, 0.2, 0.05, 1000);
    CHECK(cfg.width >= 8.0 / (0.2 * 0.2 * 0.25) - 1);
    CHECK(cfg.depth >= 3.0 * std::log(1000.0 / 0.05) - 1);
    CHECK(cfg.tracker_capacity() == 16);
    CHECK_THROWS_AS(CsConfig::sized_for(0.25, 0.2, 0.3, 1000), std::invalid_argument);
}
