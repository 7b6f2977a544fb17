#ifndef SYMNORM_NORMS_HPP
#define SYMNORM_NORMS_HPP

#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "symnorm/views.hpp"

namespace symnorm {

/// A symmetric norm oracle. Norms are constructed for an ambient dimension n
/// and evaluated through coordinate queries; a view of dim k <= n stands for
/// the ambient vector padded with zeros. All norms are normalized so that
/// l(e_i) = 1.
class SymmetricNorm {
  public:
    virtual ~SymmetricNorm() = default;

    virtual std::string name() const = 0;
    virtual size_t ambient_dim() const = 0;
    virtual double evaluate(const VecView& x) const = 0;

    /// Exact max of the norm over the l_2 unit sphere in dimension k, when a
    /// closed form is known.
    virtual std::optional<double> closed_form_max(size_t k) const { return std::nullopt; }

    double evaluate_dense(std::span<const double> x) const {
        DenseView v(x);
        return evaluate(v);
    }
    /// l(xi^(k)): the normalized all-ones direction with k nonzeros.
    double evaluate_flat(size_t k) const {
        ConstantView v(1.0 / std::sqrt(static_cast<double>(k)), k, k);
        return evaluate(v);
    }
};

constexpr double kPInfinity = std::numeric_limits<double>::infinity();

std::unique_ptr<SymmetricNorm> make_lp_norm(size_t n, double p);
std::unique_ptr<SymmetricNorm> make_topk_norm(size_t n, size_t k);
std::unique_ptr<SymmetricNorm> make_topk_dual_norm(size_t n, size_t k);
std::unique_ptr<SymmetricNorm> make_ksupport_norm(size_t n, size_t k);
std::unique_ptr<SymmetricNorm> make_boxtheta_dual_norm(size_t n, double a, double b, double c);
std::unique_ptr<SymmetricNorm> make_maxcombo_norm(size_t n);
/// Q-norm wrapper: x -> Phi(x^2)^(1/2), renormalized on the basis.
std::unique_ptr<SymmetricNorm> q_wrap(std::shared_ptr<const SymmetricNorm> phi);

/// Norm selection record: {"norm": {"kind": "topk", "k": 32}} or the bare
/// inner object. Kinds: lp, topk, topk_dual, ksupport, boxtheta_dual, qwrap,
/// maxcombo.
std::unique_ptr<SymmetricNorm> make_norm(const nlohmann::json& j, size_t n);

}  // namespace symnorm

#endif
