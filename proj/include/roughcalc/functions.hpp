#pragma once

// C^4 test functions F: R^d -> R^m with exact derivatives up to order four.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "roughcalc/tensor.hpp"

namespace roughcalc {

// A k-linear map (R^d)^k -> R^m stored as an m x d^k array; entry (c, i_1..i_k)
// sits at c * d^k + ((i_1 d + i_2) d + ...).
class Multilinear {
 public:
  Multilinear() = default;
  Multilinear(std::size_t codim, std::size_t dim, int order);

  std::size_t codim() const { return codim_; }
  std::size_t dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t block() const { return block_; }

  std::span<const double> entries() const { return entries_; }
  std::span<double> entries() { return entries_; }
  std::span<const double> row(std::size_t c) const {
    return std::span<const double>(entries_).subspan(c * block_, block_);
  }
  double& at(std::size_t c, std::size_t flat) { return entries_[c * block_ + flat]; }
  double at(std::size_t c, std::size_t flat) const { return entries_[c * block_ + flat]; }

  // Full contraction against a degree-k tensor given by its flat entries.
  Tensor1 apply(std::span<const double> tensor) const;

  template <int K>
  Tensor1 apply(const Tensor<K>& t) const {
    if (K != order_) throw DimensionError("multilinear map order differs from tensor degree");
    require_same_dim(t.dim(), dim_, "multilinear apply");
    return apply(t.entries());
  }

 private:
  std::size_t codim_ = 0;
  std::size_t dim_ = 0;
  int order_ = 0;
  std::size_t block_ = 0;
  std::vector<double> entries_;
};

// F(x) and D^1 F(x) .. D^order F(x).
struct Jet {
  Tensor1 value;
  std::vector<Multilinear> derivatives;  // derivatives[k - 1] = D^k F(x)

  const Multilinear& d(int k) const { return derivatives.at(static_cast<std::size_t>(k - 1)); }
};

inline constexpr int kMaxDerivativeOrder = 4;

// Scalar profile g: R -> R with derivatives to order four.
struct Profile {
  enum class Kind { one, polynomial, sine, exponential };
  Kind kind = Kind::one;
  std::vector<double> coefficients;  // polynomial: c_0 .. c_q

  // g^{(k)}(u) for k = 0..4
  double derivative(int k, double u) const;

  static Profile constant_one() { return {}; }
  static Profile poly(std::vector<double> coefficients) {
    return {Kind::polynomial, std::move(coefficients)};
  }
  static Profile sine() { return {Kind::sine, {}}; }
  static Profile exponential() { return {Kind::exponential, {}}; }
};

class FunctionC4 {
 public:
  class Impl {
   public:
    virtual ~Impl() = default;
    virtual Jet jet(const Tensor1& x, int max_order) const = 0;
  };

  FunctionC4(std::string family, std::size_t dim, std::size_t codim,
             std::shared_ptr<const Impl> impl);

  const std::string& family() const { return family_; }
  std::size_t dim() const { return dim_; }
  std::size_t codim() const { return codim_; }

  Jet jet(const Tensor1& x, int max_order = kMaxDerivativeOrder) const;
  Tensor1 value(const Tensor1& x) const { return jet(x, 0).value; }

  // Monomial term: coefficient * prod_i x_i^{exponents[i]} added to output `output`.
  struct Monomial {
    std::size_t output = 0;
    double coefficient = 0.0;
    std::vector<int> exponents;
  };

  // Ridge-product term: coefficient * f(a . x) * g(b . x) added to output `output`.
  struct RidgeTerm {
    std::size_t output = 0;
    double coefficient = 1.0;
    Profile f;
    Tensor1 a;
    Profile g;
    Tensor1 b;
  };

  static FunctionC4 polynomial(std::size_t dim, std::size_t codim, std::vector<Monomial> terms);
  static FunctionC4 ridge(std::string family, std::size_t dim, std::size_t codim,
                          std::vector<RidgeTerm> terms);

  // F(x) = C x for an m x d matrix given row-major.
  static FunctionC4 linear(std::size_t dim, std::size_t codim, std::span<const double> matrix);
  // F^c(x) = sum_p c_p (x_1 + ... + x_d)^p, the same for every output.
  static FunctionC4 ridge_polynomial(std::size_t dim, std::size_t codim,
                                     std::vector<double> coefficients);
  // Seeded multivariate polynomial of total degree `degree` with standard
  // normal coefficients on every monomial, independently per output.
  static FunctionC4 random_polynomial(std::size_t dim, std::size_t codim, int degree,
                                      std::uint64_t seed);
  // F^c(x) = sin(a_c . x) + exp(b_c . x) / 2 with seeded directions.
  static FunctionC4 trig_exp(std::size_t dim, std::size_t codim, std::uint64_t seed);
  // F^c(x) = sin(a_c . x) exp(b_c . x) with seeded directions.
  static FunctionC4 composite(std::size_t dim, std::size_t codim, std::uint64_t seed);

 private:
  std::string family_;
  std::size_t dim_;
  std::size_t codim_;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace roughcalc
