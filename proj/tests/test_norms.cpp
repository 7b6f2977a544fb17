#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "json.hpp"
#include "symnorm/norms.hpp"

using namespace symnorm;

namespace {

std::vector<std::pair<std::string, std::shared_ptr<const SymmetricNorm>>> all_norms(size_t n) {
    std::vector<std::pair<std::string, std::shared_ptr<const SymmetricNorm>>> out;
    out.emplace_back("l1", make_lp_norm(n, 1.0));
    out.emplace_back("l2", make_lp_norm(n, 2.0));
    out.emplace_back("l4", make_lp_norm(n, 4.0));
    out.emplace_back("linf", make_lp_norm(n, kPInfinity));
    out.emplace_back("top5", make_topk_norm(n, std::min<size_t>(5, n)));
    out.emplace_back("top5_dual", make_topk_dual_norm(n, std::min<size_t>(5, n)));
    out.emplace_back("ksup4", make_ksupport_norm(n, std::min<size_t>(4, n)));
    out.emplace_back("boxtheta", make_boxtheta_dual_norm(n, 0.05, 1.0, 2.0));
    out.emplace_back("qwrap_top4",
                     q_wrap(make_topk_norm(n, std::min<size_t>(4, n))));
    out.emplace_back("maxcombo", make_maxcombo_norm(n));
    return out;
}

std::vector<double> random_probe(size_t n, std::mt19937_64& rng, double scale = 10.0) {
    std::normal_distribution<double> g(0.0, scale);
    std::vector<double> x(n);
    for (auto& v : x) v = g(rng);
    return x;
}

// Gauge of the k-support ball at n=3, k=2 by convex decomposition over the
// three 2-element supports, solved by nested grid refinement.
double ksupport_gauge_oracle_n3k2(std::array<double, 3> x) {
    for (auto& v : x) v = std::abs(v);
    std::sort(x.begin(), x.end(), std::greater<double>());
    if (x[0] == 0) return 0.0;
    auto f = [&](double a1, double b1, double c2) {
        double z1 = std::hypot(a1, b1);
        double z2 = std::hypot(x[0] - a1, c2);
        double z3 = std::hypot(x[1] - b1, x[2] - c2);
        return z1 + z2 + z3;
    };
    double ca = x[0] / 2, cb = x[1] / 2, cc = x[2] / 2;
    double ra = x[0] / 2, rb = x[1] / 2, rc = x[2] / 2;
    double best = f(ca, cb, cc);
    const int grid = 12;
    for (int round = 0; round < 8; ++round) {
        double ba = ca, bb = cb, bc = cc;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j)
                for (int k = 0; k <= grid; ++k) {
                    double a1 = ca - ra + 2 * ra * i / grid;
                    double b1 = cb - rb + 2 * rb * j / grid;
                    double c2 = cc - rc + 2 * rc * k / grid;
                    a1 = std::clamp(a1, 0.0, x[0]);
                    b1 = std::clamp(b1, 0.0, x[1]);
                    c2 = std::clamp(c2, 0.0, x[2]);
                    double v = f(a1, b1, c2);
                    if (v < best) {
                        best = v;
                        ba = a1;
                        bb = b1;
                        bc = c2;
                    }
                }
        ca = ba;
        cb = bb;
        cc = bc;
        ra = std::max(ra / 4, 1e-9);
        rb = std::max(rb / 4, 1e-9);
        rc = std::max(rc / 4, 1e-9);
    }
    return best;
}

}  // namespace

TEST_CASE("lp norm basics") {
    auto l2 = make_lp_norm(4, 2.0);
    CHECK(l2->evaluate_dense(std::vector<double>{3, 4}) == doctest::Approx(5.0));
    auto l1 = make_lp_norm(4, 1.0);
    CHECK(l1->evaluate_dense(std::vector<double>{1, -1, 1}) == doctest::Approx(3.0));
    auto linf = make_lp_norm(4, kPInfinity);
    CHECK(linf->evaluate_dense(std::vector<double>{2, -7, 0}) == doctest::Approx(7.0));
    CHECK_THROWS_AS(make_lp_norm(4, 0.5), std::invalid_argument);
}

TEST_CASE("top-k sums the k largest magnitudes") {
    auto t2 = make_topk_norm(4, 2);
    CHECK(t2->evaluate_dense(std::vector<double>{3, 1, -2, 0}) == doctest::Approx(5.0));

    std::mt19937_64 rng(5);
    auto tn = make_topk_norm(8, 8);
    auto t1 = make_topk_norm(8, 1);
    auto l1 = make_lp_norm(8, 1.0);
    auto linf = make_lp_norm(8, kPInfinity);
    for (int i = 0; i < 50; ++i) {
        auto x = random_probe(8, rng);
        CHECK(tn->evaluate_dense(x) == doctest::Approx(l1->evaluate_dense(x)));
        CHECK(t1->evaluate_dense(x) == doctest::Approx(linf->evaluate_dense(x)));
    }
    CHECK_THROWS_AS(make_topk_norm(4, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_topk_norm(4, 5), std::invalid_argument);
}

TEST_CASE("top-k dual closed form") {
    auto d2 = make_topk_dual_norm(4, 2);
    CHECK(d2->evaluate_dense(std::vector<double>{3, 1, -2, 0}) == doctest::Approx(3.0));
    auto d4 = make_topk_dual_norm(4, 4);
    CHECK(d4->evaluate_dense(std::vector<double>{1, 1, 1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("top-k dual matches the duality oracle") {
    // sup over y of <x,y>/topk(y); structured sign patterns attain the sup,
    // random probes provide lower bounds.
    const size_t n = 6;
    std::mt19937_64 rng(17);
    for (size_t k = 1; k <= n; ++k) {
        auto phi = make_topk_norm(n, k);
        auto dual = make_topk_dual_norm(n, k);
        for (int trial = 0; trial < 20; ++trial) {
            auto x = random_probe(n, rng);
            double sup = 0.0;
            for (int probe = 0; probe < 200; ++probe) {
                auto y = random_probe(n, rng, 1.0);
                double inner = 0.0;
                for (size_t i = 0; i < n; ++i) inner += x[i] * y[i];
                sup = std::max(sup, std::abs(inner) / phi->evaluate_dense(y));
            }
            std::vector<size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
                return std::abs(x[a]) > std::abs(x[b]);
            });
            for (size_t j = 1; j <= n; ++j) {
                std::vector<double> y(n, 0.0);
                for (size_t i = 0; i < j; ++i)
                    y[order[i]] = x[order[i]] >= 0 ? 1.0 : -1.0;
                double inner = 0.0;
                for (size_t i = 0; i < n; ++i) inner += x[i] * y[i];
                sup = std::max(sup, std::abs(inner) / phi->evaluate_dense(y));
            }
            double expect = dual->evaluate_dense(x);
            CHECK(sup == doctest::Approx(expect).epsilon(0.05));
        }
    }
}

TEST_CASE("k-support endpoints: cross-polytope and l2 ball") {
    std::mt19937_64 rng(23);
    auto k1 = make_ksupport_norm(6, 1);
    auto kn = make_ksupport_norm(6, 6);
    auto l1 = make_lp_norm(6, 1.0);
    auto l2 = make_lp_norm(6, 2.0);
    for (int i = 0; i < 100; ++i) {
        auto x = random_probe(6, rng);
        CHECK(k1->evaluate_dense(x) == doctest::Approx(l1->evaluate_dense(x)));
        CHECK(kn->evaluate_dense(x) == doctest::Approx(l2->evaluate_dense(x)));
    }
}

TEST_CASE("k-support closed form agrees with the gauge oracle on the n=3 grid") {
    auto ks = make_ksupport_norm(3, 2);
    int checked = 0;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b)
            for (int c = -2; c <= 2; ++c) {
                if (a == 0 && b == 0 && c == 0) continue;
                std::vector<double> x{static_cast<double>(a), static_cast<double>(b),
                                      static_cast<double>(c)};
                double got = ks->evaluate_dense(x);
                double want = ksupport_gauge_oracle_n3k2(
                    {x[0], x[1], x[2]});
                CHECK(got == doctest::Approx(want).epsilon(1e-3));
                ++checked;
            }
    CHECK(checked == 124);
}

TEST_CASE("k-support example vector (2,1,1)") {
    auto ks = make_ksupport_norm(3, 2);
    double got = ks->evaluate_dense(std::vector<double>{2, 1, 1});
    double want = ksupport_gauge_oracle_n3k2({2, 1, 1});
    CHECK(got == doctest::Approx(want).epsilon(1e-3));
}

TEST_CASE("box-theta dual greedy matches brute force over a theta grid") {
    // n = 2, a = 0.5, b = 1, c = 1.5; unnormalized brute force at resolution 1e-3.
    double a = 0.5, b = 1.0, c = 1.5;
    auto norm = make_boxtheta_dual_norm(2, a, b, c);
    double norm_const = std::sqrt(std::min(b, a + (c - 2 * a)));  // value on e_1
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> x = trial == 0 ? std::vector<double>{1.0, 0.0}
                                           : random_probe(2, rng, 2.0);
        double best = 0.0;
        for (double t1 = a; t1 <= b + 1e-12; t1 += 1e-3)
            for (double t2 = a; t2 <= std::min(b, c - t1) + 1e-12; t2 += 1e-3)
                best = std::max(best, t1 * x[0] * x[0] + t2 * x[1] * x[1]);
        double want = std::sqrt(best) / norm_const;
        CHECK(norm->evaluate_dense(x) == doctest::Approx(want).epsilon(2e-3));
    }
    CHECK(norm->evaluate_dense(std::vector<double>{1.0, 0.0}) == doctest::Approx(1.0));
    CHECK(norm->evaluate_dense(std::vector<double>{0.0, 0.0}) == doctest::Approx(0.0));
}

TEST_CASE("box-theta with full budget reduces to scaled l2") {
    // c >= n*b opens the box completely, so the normalized norm is exactly l2.
    auto norm = make_boxtheta_dual_norm(4, 0.5, 1.0, 10.0);
    auto l2 = make_lp_norm(4, 2.0);
    std::mt19937_64 rng(37);
    for (int i = 0; i < 50; ++i) {
        auto x = random_probe(4, rng);
        CHECK(norm->evaluate_dense(x) == doctest::Approx(l2->evaluate_dense(x)));
    }
}

TEST_CASE("box-theta rejects bad parameters") {
    CHECK_THROWS_AS(make_boxtheta_dual_norm(4, 1.0, 0.5, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(make_boxtheta_dual_norm(4, 0.5, 1.0, 0.4), std::invalid_argument);
    // floor exceeds budget: n*a > c
    CHECK_THROWS_AS(make_boxtheta_dual_norm(10, 0.5, 1.0, 2.0), std::invalid_argument);
}

TEST_CASE("q_wrap composes as expected") {
    std::mt19937_64 rng(41);
    auto q_l1 = q_wrap(make_lp_norm(8, 1.0));
    auto q_linf = q_wrap(make_lp_norm(8, kPInfinity));
    auto q_top3 = q_wrap(make_topk_norm(8, 3));
    auto l2 = make_lp_norm(8, 2.0);
    auto linf = make_lp_norm(8, kPInfinity);
    for (int i = 0; i < 50; ++i) {
        auto x = random_probe(8, rng);
        CHECK(q_l1->evaluate_dense(x) == doctest::Approx(l2->evaluate_dense(x)));
        CHECK(q_linf->evaluate_dense(x) == doctest::Approx(linf->evaluate_dense(x)));
        auto sorted = x;
        for (auto& v : sorted) v = v * v;
        std::sort(sorted.begin(), sorted.end(), std::greater<double>());
        double want = std::sqrt(sorted[0] + sorted[1] + sorted[2]);
        CHECK(q_top3->evaluate_dense(x) == doctest::Approx(want));
    }
}

TEST_CASE("maxcombo hides an l_inf copy below sqrt(n) support") {
    const size_t n = 64;
    auto mc = make_maxcombo_norm(n);
    std::vector<double> e1(n, 0.0);
    e1[0] = 1.0;
    CHECK(mc->evaluate_dense(e1) == doctest::Approx(1.0));
    std::vector<double> ones(n, 1.0);
    CHECK(mc->evaluate_dense(ones) == doctest::Approx(8.0));  // n/sqrt(n)
    std::vector<double> sqrt_ones(n, 0.0);
    for (int i = 0; i < 8; ++i) sqrt_ones[i] = 1.0;  // sqrt(64) ones
    CHECK(mc->evaluate_dense(sqrt_ones) == doctest::Approx(1.0));
}

TEST_CASE("symmetry, homogeneity, triangle, monotonicity, and norm bounds") {
    const size_t n = 16;
    std::mt19937_64 rng(53);
    auto linf = make_lp_norm(n, kPInfinity);
    auto l1 = make_lp_norm(n, 1.0);
    for (auto& [name, norm] : all_norms(n)) {
        CAPTURE(name);
        // basis normalization
        std::vector<double> e(n, 0.0);
        e[3] = 1.0;
        CHECK(norm->evaluate_dense(e) == doctest::Approx(1.0));
        for (int probe = 0; probe < 1000; ++probe) {
            auto x = random_probe(n, rng);
            double lx = norm->evaluate_dense(x);

            auto perm = x;
            std::shuffle(perm.begin(), perm.end(), rng);
            for (auto& v : perm)
                if (rng() & 1) v = -v;
            CHECK(norm->evaluate_dense(perm) == doctest::Approx(lx).epsilon(1e-9));

            double cscale = -2.5;
            auto scaled = x;
            for (auto& v : scaled) v *= cscale;
            CHECK(norm->evaluate_dense(scaled) ==
                  doctest::Approx(std::abs(cscale) * lx).epsilon(1e-9));

            auto y = random_probe(n, rng);
            auto sum = x;
            for (size_t i = 0; i < n; ++i) sum[i] += y[i];
            double ly = norm->evaluate_dense(y);
            CHECK(norm->evaluate_dense(sum) <= (lx + ly) * (1 + 1e-9));

            auto dominated = x;
            for (auto& v : dominated) v *= 0.3 + 0.7 * (rng() % 1000) / 1000.0;
            CHECK(norm->evaluate_dense(dominated) <= lx * (1 + 1e-9));

            // Fact: l_inf <= l <= l_1 for normalized symmetric norms.
            CHECK(linf->evaluate_dense(x) <= lx * (1 + 1e-9));
            CHECK(lx <= l1->evaluate_dense(x) * (1 + 1e-9));
        }
    }
}

TEST_CASE("John bound: spread of l over the sphere is at most sqrt(n)") {
    const size_t n = 16;
    std::mt19937_64 rng(59);
    std::normal_distribution<double> g(0.0, 1.0);
    for (auto& [name, norm] : all_norms(n)) {
        CAPTURE(name);
        double lo = 1e300, hi = 0.0;
        std::vector<double> x(n);
        for (int s = 0; s < 10000; ++s) {
            double nrm = 0.0;
            for (auto& v : x) {
                v = g(rng);
                nrm += v * v;
            }
            nrm = std::sqrt(nrm);
            for (auto& v : x) v /= nrm;
            double val = norm->evaluate_dense(x);
            lo = std::min(lo, val);
            hi = std::max(hi, val);
        }
        CHECK(hi / lo <= std::sqrt(static_cast<double>(n)) * 1.01);
    }
}

TEST_CASE("norm JSON factory") {
    nlohmann::json j = {{"norm", {{"kind", "topk"}, {"k", 32}}}};
    auto norm = make_norm(j, 64);
    CHECK(norm->name() == "top32");

    auto lp = make_norm(nlohmann::json{{"kind", "lp"}, {"p", "inf"}}, 8);
    CHECK(lp->evaluate_dense(std::vector<double>{1, -4}) == doctest::Approx(4.0));

    auto qw = make_norm(nlohmann::json::parse(
                            R"({"kind":"qwrap","inner":{"kind":"lp","p":1}})"),
                        8);
    CHECK(qw->evaluate_dense(std::vector<double>{3, 4}) == doctest::Approx(5.0));

    CHECK_THROWS_AS(make_norm(nlohmann::json{{"kind", "nope"}}, 8), std::invalid_argument);
}
