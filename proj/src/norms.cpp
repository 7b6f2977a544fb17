#include "symnorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace symnorm {

namespace {

std::vector<double> abs_values(const VecView& x) {
    std::vector<double> out(x.dim());
    for (size_t i = 0; i < out.size(); ++i) out[i] = std::abs(x.at(i));
    return out;
}

class LpNorm final : public SymmetricNorm {
  public:
    LpNorm(size_t n, double p) : n_(n), p_(p) {
        if (!(p >= 1.0)) throw std::invalid_argument("lp requires p >= 1");
    }
    std::string name() const override {
        return std::isinf(p_) ? "linf" : "l" + std::to_string(p_);
    }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        if (std::isinf(p_)) {
            double m = 0.0;
            for (size_t i = 0; i < x.dim(); ++i) m = std::max(m, std::abs(x.at(i)));
            return m;
        }
        if (p_ == 1.0) {
            double s = 0.0;
            for (size_t i = 0; i < x.dim(); ++i) s += std::abs(x.at(i));
            return s;
        }
        if (p_ == 2.0) {
            double s = 0.0;
            for (size_t i = 0; i < x.dim(); ++i) {
                double v = x.at(i);
                s += v * v;
            }
            return std::sqrt(s);
        }
        double s = 0.0;
        for (size_t i = 0; i < x.dim(); ++i) s += std::pow(std::abs(x.at(i)), p_);
        return std::pow(s, 1.0 / p_);
    }
    std::optional<double> closed_form_max(size_t k) const override {
        if (std::isinf(p_)) return 1.0;
        double e = std::max(0.0, 1.0 / p_ - 0.5);
        return std::pow(static_cast<double>(k), e);
    }

  private:
    size_t n_;
    double p_;
};

class TopkNorm final : public SymmetricNorm {
  public:
    TopkNorm(size_t n, size_t k) : n_(n), k_(k) {
        if (k < 1 || k > n) throw std::invalid_argument("topk requires 1 <= k <= n");
    }
    std::string name() const override { return "top" + std::to_string(k_); }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        auto mags = abs_values(x);
        size_t k = std::min(k_, mags.size());
        if (k == 0) return 0.0;
        if (k < mags.size())
            std::nth_element(mags.begin(), mags.begin() + static_cast<long>(k) - 1,
                             mags.end(), std::greater<double>());
        return std::accumulate(mags.begin(), mags.begin() + static_cast<long>(k), 0.0);
    }
    std::optional<double> closed_form_max(size_t k) const override {
        return std::sqrt(static_cast<double>(std::min(k, k_)));
    }

  private:
    size_t n_, k_;
};

class TopkDualNorm final : public SymmetricNorm {
  public:
    TopkDualNorm(size_t n, size_t k) : n_(n), k_(k) {
        if (k < 1 || k > n) throw std::invalid_argument("topk dual requires 1 <= k <= n");
    }
    std::string name() const override { return "top" + std::to_string(k_) + "_dual"; }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        double maxabs = 0.0, sum = 0.0;
        for (size_t i = 0; i < x.dim(); ++i) {
            double v = std::abs(x.at(i));
            maxabs = std::max(maxabs, v);
            sum += v;
        }
        return std::max(maxabs, sum / static_cast<double>(k_));
    }
    std::optional<double> closed_form_max(size_t k) const override {
        return std::max(1.0, std::sqrt(static_cast<double>(k)) / static_cast<double>(k_));
    }

  private:
    size_t n_, k_;
};

// Sorted-prefix closed form from the sparse-recovery literature; anchored by
// the gauge-oracle test rather than asserted.
class KSupportNorm final : public SymmetricNorm {
  public:
    KSupportNorm(size_t n, size_t k) : n_(n), k_(k) {
        if (k < 1 || k > n) throw std::invalid_argument("ksupport requires 1 <= k <= n");
    }
    std::string name() const override { return "ksup" + std::to_string(k_); }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        auto z = abs_values(x);
        std::sort(z.begin(), z.end(), std::greater<double>());
        size_t k = k_;
        auto zat = [&](int64_t i) {  // 0-based, out of range reads as 0
            if (i < 0) return std::numeric_limits<double>::infinity();
            return i < static_cast<int64_t>(z.size()) ? z[static_cast<size_t>(i)] : 0.0;
        };
        // Suffix sums T_r = sum_{i >= k-r-1} z[i].
        double suffix = 0.0;
        for (size_t i = std::min(z.size(), static_cast<size_t>(k - 1)); i < z.size(); ++i)
            suffix += z[i];
        double prefix_sq = 0.0;
        for (size_t i = 0; i + 1 < k && i < z.size(); ++i) prefix_sq += z[i] * z[i];

        for (size_t r = 0; r < k; ++r) {
            int64_t left = static_cast<int64_t>(k) - static_cast<int64_t>(r) - 2;
            int64_t right = left + 1;
            double mean = suffix / static_cast<double>(r + 1);
            if (zat(left) > mean && mean >= zat(right)) {
                double head = prefix_sq;
                return std::sqrt(head + suffix * suffix / static_cast<double>(r + 1));
            }
            // Move boundary one position up: z[right-?]... fold z[k-r-2] into suffix.
            if (left >= 0) {
                double zl = zat(left);
                suffix += zl;
                prefix_sq -= zl * zl;
            }
        }
        // Fallback (floating ties): fully averaged case.
        double l1 = std::accumulate(z.begin(), z.end(), 0.0);
        return std::sqrt(l1 * l1 / static_cast<double>(k));
    }

  private:
    size_t n_, k_;
};

// Dual box-Theta norm: max over theta in the box-with-budget polytope of
// (sum theta_i x_i^2)^(1/2), via the greedy vertex. Normalized on e_1.
class BoxThetaDualNorm final : public SymmetricNorm {
  public:
    BoxThetaDualNorm(size_t n, double a, double b, double c)
        : n_(n), a_(a), b_(b), c_(c) {
        if (!(0 < a && a < b && b <= c))
            throw std::invalid_argument("boxtheta requires 0 < a < b <= c");
        if (static_cast<double>(n) * a > c)
            throw std::invalid_argument("boxtheta budget binds below the floor (n*a > c)");
        norm_const_ = std::sqrt(raw_single_weight());
    }
    std::string name() const override { return "boxtheta_dual"; }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        auto sq = abs_values(x);
        for (auto& v : sq) v *= v;
        std::sort(sq.begin(), sq.end(), std::greater<double>());
        double total_sq = std::accumulate(sq.begin(), sq.end(), 0.0);
        double budget = c_ - static_cast<double>(n_) * a_;
        double boosted = 0.0;
        for (double v : sq) {
            if (budget <= 0.0 || v == 0.0) break;
            double boost = std::min(b_ - a_, budget);
            boosted += boost * v;
            budget -= boost;
        }
        return std::sqrt(a_ * total_sq + boosted) / norm_const_;
    }
    std::optional<double> closed_form_max(size_t) const override { return 1.0; }

  private:
    double raw_single_weight() const { return std::min(b_, a_ + (c_ - static_cast<double>(n_) * a_)); }
    size_t n_;
    double a_, b_, c_;
    double norm_const_;
};

class MaxComboNorm final : public SymmetricNorm {
  public:
    explicit MaxComboNorm(size_t n) : n_(n), sqrt_n_(std::sqrt(static_cast<double>(n))) {}
    std::string name() const override { return "maxcombo"; }
    size_t ambient_dim() const override { return n_; }
    double evaluate(const VecView& x) const override {
        double maxabs = 0.0, sum = 0.0;
        for (size_t i = 0; i < x.dim(); ++i) {
            double v = std::abs(x.at(i));
            maxabs = std::max(maxabs, v);
            sum += v;
        }
        return std::max(maxabs, sum / sqrt_n_);
    }
    std::optional<double> closed_form_max(size_t) const override { return 1.0; }

  private:
    size_t n_;
    double sqrt_n_;
};

class QWrapNorm final : public SymmetricNorm {
  public:
    explicit QWrapNorm(std::shared_ptr<const SymmetricNorm> phi) : phi_(std::move(phi)) {
        if (!phi_) throw std::invalid_argument("qwrap requires an inner norm");
        std::vector<double> e1{1.0};
        DenseView v(e1);
        SquaredView sq(v);
        norm_const_ = std::sqrt(phi_->evaluate(sq));
    }
    std::string name() const override { return "qwrap(" + phi_->name() + ")"; }
    size_t ambient_dim() const override { return phi_->ambient_dim(); }
    double evaluate(const VecView& x) const override {
        SquaredView sq(x);
        return std::sqrt(phi_->evaluate(sq)) / norm_const_;
    }
    std::optional<double> closed_form_max(size_t) const override { return 1.0; }

  private:
    std::shared_ptr<const SymmetricNorm> phi_;
    double norm_const_;
};

}  // namespace

std::unique_ptr<SymmetricNorm> make_lp_norm(size_t n, double p) {
    return std::make_unique<LpNorm>(n, p);
}
std::unique_ptr<SymmetricNorm> make_topk_norm(size_t n, size_t k) {
    return std::make_unique<TopkNorm>(n, k);
}
std::unique_ptr<SymmetricNorm> make_topk_dual_norm(size_t n, size_t k) {
    return std::make_unique<TopkDualNorm>(n, k);
}
std::unique_ptr<SymmetricNorm> make_ksupport_norm(size_t n, size_t k) {
    return std::make_unique<KSupportNorm>(n, k);
}
std::unique_ptr<SymmetricNorm> make_boxtheta_dual_norm(size_t n, double a, double b, double c) {
    return std::make_unique<BoxThetaDualNorm>(n, a, b, c);
}
std::unique_ptr<SymmetricNorm> make_maxcombo_norm(size_t n) {
    return std::make_unique<MaxComboNorm>(n);
}
std::unique_ptr<SymmetricNorm> q_wrap(std::shared_ptr<const SymmetricNorm> phi) {
    return std::make_unique<QWrapNorm>(std::move(phi));
}

std::unique_ptr<SymmetricNorm> make_norm(const nlohmann::json& root, size_t n) {
    const nlohmann::json& j = root.contains("norm") ? root.at("norm") : root;
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "lp") {
        if (j.contains("p") && j.at("p").is_string()) {
            std::string p = j.at("p").get<std::string>();
            if (p == "inf" || p == "infinity") return make_lp_norm(n, kPInfinity);
            throw std::invalid_argument("bad p: " + p);
        }
        return make_lp_norm(n, j.at("p").get<double>());
    }
    if (kind == "topk") return make_topk_norm(n, j.at("k").get<size_t>());
    if (kind == "topk_dual") return make_topk_dual_norm(n, j.at("k").get<size_t>());
    if (kind == "ksupport") return make_ksupport_norm(n, j.at("k").get<size_t>());
    if (kind == "boxtheta_dual")
        return make_boxtheta_dual_norm(n, j.at("a").get<double>(), j.at("b").get<double>(),
                                       j.at("c").get<double>());
    if (kind == "maxcombo") return make_maxcombo_norm(n);
    if (kind == "qwrap") {
        std::shared_ptr<const SymmetricNorm> inner = make_norm(j.at("inner"), n);
        return q_wrap(std::move(inner));
    }
    throw std::invalid_argument("unknown norm kind: " + kind);
}

}  // namespace symnorm
