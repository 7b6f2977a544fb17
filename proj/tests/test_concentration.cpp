#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "symnorm/concentration.hpp"
#include "symnorm/norms.hpp"

using namespace symnorm;

TEST_CASE("median of l2 on the sphere is exactly 1") {
    auto l2 = make_lp_norm(1024, 2.0);
    for (size_t k : {4, 64, 1024}) {
        double m = estimate_median(*l2, k, 400, 99);
        CHECK(m == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("median preconditions") {
    auto l2 = make_lp_norm(16, 2.0);
    CHECK_THROWS_AS(estimate_median(*l2, 16, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS(estimate_median(*l2, 0, 200, 1), std::invalid_argument);
}

TEST_CASE("median of l_inf tracks sqrt(log k / k)") {
    auto linf = make_lp_norm(2048, kPInfinity);
    size_t k = 1024;
    double m = estimate_median(*linf, k, 10000, 7);
    double scale = std::sqrt(std::log(static_cast<double>(k)) / static_cast<double>(k));
    // fitted constants bracketing the known Theta(sqrt(log k / k)) behavior
    CHECK(m >= 1.0 * scale);
    CHECK(m <= 2.2 * scale);
}

TEST_CASE("median of l1 is self-consistent across independent runs") {
    auto l1 = make_lp_norm(2048, 1.0);
    double a = estimate_median(*l1, 1024, 10000, 1234);
    double b = estimate_median(*l1, 1024, 10000, 987654321);
    CHECK(a == doctest::Approx(b).epsilon(0.02));
}

TEST_CASE("closed-form maxima") {
    bool heur = true;
    auto l4 = make_lp_norm(64, 4.0);
    CHECK(estimate_max(*l4, 64, &heur) == doctest::Approx(1.0));
    CHECK_FALSE(heur);

    auto l2 = make_lp_norm(64, 2.0);
    CHECK(estimate_max(*l2, 64) == doctest::Approx(1.0));

    auto l1 = make_lp_norm(64, 1.0);
    CHECK(estimate_max(*l1, 64) == doctest::Approx(8.0));  // sqrt(64)

    auto top5 = make_topk_norm(64, 5);
    CHECK(estimate_max(*top5, 64) == doctest::Approx(std::sqrt(5.0)));
    CHECK(estimate_max(*top5, 3) == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("heuristic max is flagged and finds the flat maximizer for k-support") {
    // ksup has no closed form here; b on S^(k-1) is ~sqrt(k/k'), attained at
    // the flat vector, which the xi-scan hits exactly.
    auto ks = make_ksupport_norm(64, 4);
    bool heur = false;
    double b = estimate_max(*ks, 64, &heur, 5);
    CHECK(heur);
    double flat = ks->evaluate_flat(64);
    CHECK(b >= flat * (1 - 1e-9));
    CHECK(b <= std::sqrt(64.0 / 4.0) * 1.05);
}

TEST_CASE("dimension grid covers both endpoints geometrically") {
    auto g = dimension_grid(4096, 0);
    CHECK(g.front() == 1);
    CHECK(g.back() == 4096);
    for (size_t i = 1; i + 1 < g.size(); ++i) CHECK(g[i] == 2 * g[i - 1]);

    auto g5 = dimension_grid(1000, 5);
    CHECK(g5.front() == 1);
    CHECK(g5.back() == 1000);
}

TEST_CASE("mmc of l2 is 1 and the profile is deterministic") {
    auto l2 = make_lp_norm(256, 2.0);
    auto p = compute_mmc(*l2, 256, 0, 400, 42);
    CHECK(p.max_mc == doctest::Approx(1.0).epsilon(1e-9));
    auto q = compute_mmc(*l2, 256, 0, 400, 42, 2);
    CHECK(p.max_mc == q.max_mc);
    for (size_t i = 0; i < p.rows.size(); ++i) {
        CHECK(p.rows[i].median == q.rows[i].median);
        CHECK(p.rows[i].mc >= 1.0 - 1e-6);
    }
}

TEST_CASE("maxcombo mc peaks near sqrt(n)") {
    const size_t n = 4096;
    auto mc = make_maxcombo_norm(n);
    auto p = compute_mmc(*mc, n, 0, 2000, 11);
    size_t argmax = 0;
    double best = 0;
    for (const auto& r : p.rows)
        if (r.mc > best) {
            best = r.mc;
            argmax = r.k;
        }
    CHECK(argmax >= 16);   // sqrt(n)/4
    CHECK(argmax <= 256);  // 4*sqrt(n)
    CHECK(p.max_mc > 2.0);
}

TEST_CASE("flat median lemma with pinned generous constants") {
    // lambda1 * M / sqrt(log k) <= l(xi^(k)) <= lambda2 * M
    const double lambda1 = 0.05, lambda2 = 20.0;
    const size_t n = 512;
    std::vector<std::shared_ptr<const SymmetricNorm>> norms;
    norms.push_back(make_lp_norm(n, 1.0));
    norms.push_back(make_lp_norm(n, 2.0));
    norms.push_back(make_lp_norm(n, 4.0));
    norms.push_back(make_lp_norm(n, kPInfinity));
    norms.push_back(make_topk_norm(n, 16));
    norms.push_back(make_topk_dual_norm(n, 16));
    norms.push_back(make_ksupport_norm(n, 8));
    norms.push_back(make_maxcombo_norm(n));
    for (const auto& norm : norms) {
        CAPTURE(norm->name());
        auto p = compute_mmc(*norm, n, 0, 1000, 17);
        for (const auto& row : p.rows) {
            double flat = norm->evaluate_flat(row.k);
            double logk = std::log(static_cast<double>(std::max<size_t>(row.k, 2)));
            CHECK(flat >= lambda1 * row.median / std::sqrt(logk));
            CHECK(flat <= lambda2 * row.median);
        }
    }
}

TEST_CASE("monotonicity of the median up to mmc * sqrt(log)") {
    const double lambda = 20.0;
    const size_t n = 512;
    std::vector<std::shared_ptr<const SymmetricNorm>> norms;
    norms.push_back(make_lp_norm(n, 4.0));
    norms.push_back(make_topk_norm(n, 16));
    norms.push_back(make_lp_norm(n, kPInfinity));
    norms.push_back(make_ksupport_norm(n, 8));
    for (const auto& norm : norms) {
        CAPTURE(norm->name());
        auto p = compute_mmc(*norm, n, 0, 1000, 19);
        for (size_t i = 0; i < p.rows.size(); ++i)
            for (size_t j = i; j < p.rows.size(); ++j) {
                double logk =
                    std::log(static_cast<double>(std::max<size_t>(p.rows[i].k, 2)));
                CHECK(p.rows[i].median <=
                      lambda * p.max_mc * std::sqrt(logk) * p.rows[j].median);
            }
    }
}

TEST_CASE("profile JSON round trip") {
    auto l4 = make_lp_norm(128, 4.0);
    auto p = compute_mmc(*l4, 128, 0, 200, 3);
    auto j = profile_to_json(p);
    auto back = profile_from_json(j);
    CHECK(back.max_mc == p.max_mc);
    CHECK(back.rows.size() == p.rows.size());
    CHECK(back.rows[3].median == p.rows[3].median);
}
