#ifndef SYMNORM_VIEWS_HPP
#define SYMNORM_VIEWS_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace symnorm {

/// Coordinate-query access to a vector. Norm oracles only ever see this
/// interface, so succinct representations never have to be densified.
class VecView {
  public:
    virtual ~VecView() = default;
    virtual size_t dim() const = 0;
    virtual double at(size_t i) const = 0;
};

class DenseView final : public VecView {
  public:
    explicit DenseView(std::span<const double> data) : data_(data) {}
    size_t dim() const override { return data_.size(); }
    double at(size_t i) const override { return data_[i]; }

  private:
    std::span<const double> data_;
};

/// `count` copies of `value` followed by zeros up to `dim`.
class ConstantView final : public VecView {
  public:
    ConstantView(double value, size_t count, size_t dim)
        : value_(value), count_(count), dim_(dim) {}
    size_t dim() const override { return dim_; }
    double at(size_t i) const override { return i < count_ ? value_ : 0.0; }

  private:
    double value_;
    size_t count_, dim_;
};

/// Lazy coordinate-wise square of another view (Q-norm plumbing).
class SquaredView final : public VecView {
  public:
    explicit SquaredView(const VecView& inner) : inner_(inner) {}
    size_t dim() const override { return inner_.dim(); }
    double at(size_t i) const override {
        double v = inner_.at(i);
        return v * v;
    }

  private:
    const VecView& inner_;
};

inline std::vector<double> to_dense(const VecView& v) {
    std::vector<double> out(v.dim());
    for (size_t i = 0; i < out.size(); ++i) out[i] = v.at(i);
    return out;
}

}  // namespace symnorm

#endif
