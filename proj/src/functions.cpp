#include "roughcalc/functions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "roughcalc/kernels.hpp"
#include "roughcalc/random.hpp"

namespace roughcalc {

Multilinear::Multilinear(std::size_t codim, std::size_t dim, int order)
    : codim_(codim), dim_(dim), order_(order) {
  if (codim == 0 || dim == 0) throw DimensionError("multilinear map needs positive dimensions");
  if (order < 1 || order > kMaxDerivativeOrder) {
    throw std::invalid_argument("multilinear order must be in [1, 4]");
  }
  block_ = 1;
  for (int k = 0; k < order; ++k) block_ *= dim;
  entries_.assign(codim * block_, 0.0);
}

Tensor1 Multilinear::apply(std::span<const double> tensor) const {
  if (tensor.size() != block_) throw DimensionError("multilinear apply: tensor size mismatch");
  Tensor1 out(codim_);
  for (std::size_t c = 0; c < codim_; ++c) out[c] = kernels::dot(row(c), tensor);
  return out;
}

double Profile::derivative(int k, double u) const {
  switch (kind) {
    case Kind::one:
      return k == 0 ? 1.0 : 0.0;
    case Kind::polynomial: {
      // Horner on the k-th derivative's coefficients c_p p! / (p - k)!.
      double acc = 0.0;
      for (std::size_t p = coefficients.size(); p-- > static_cast<std::size_t>(k);) {
        double falling = 1.0;
        for (int r = 0; r < k; ++r) falling *= static_cast<double>(p - r);
        acc = acc * u + coefficients[p] * falling;
      }
      return acc;
    }
    case Kind::sine:
      switch (k % 4) {
        case 0: return std::sin(u);
        case 1: return std::cos(u);
        case 2: return -std::sin(u);
        default: return -std::cos(u);
      }
    case Kind::exponential:
      return std::exp(u);
  }
  return 0.0;
}

namespace {

// Index tuple of a flat offset into (R^d)^{(x) k}.
void unflatten(std::size_t flat, std::size_t dim, int order, std::size_t* idx) {
  for (int p = order - 1; p >= 0; --p) {
    idx[p] = flat % dim;
    flat /= dim;
  }
}

class MonomialImpl final : public FunctionC4::Impl {
 public:
  MonomialImpl(std::size_t dim, std::size_t codim, std::vector<FunctionC4::Monomial> terms)
      : dim_(dim), codim_(codim), terms_(std::move(terms)) {
    for (const auto& term : terms_) {
      if (term.output >= codim_) throw std::invalid_argument("monomial output index out of range");
      if (term.exponents.size() != dim_) {
        throw DimensionError("monomial exponent count must equal the domain dimension");
      }
      for (int e : term.exponents) {
        if (e < 0) throw std::invalid_argument("monomial exponents must be nonnegative");
      }
    }
  }

  Jet jet(const Tensor1& x, int max_order) const override {
    require_same_dim(x.dim(), dim_, "function argument");
    Jet out{Tensor1(codim_), {}};
    for (const auto& term : terms_) out.value[term.output] += term.coefficient * power_product(term, x, nullptr);
    std::size_t idx[kMaxDerivativeOrder];
    std::vector<int> taken(dim_);
    for (int k = 1; k <= max_order; ++k) {
      Multilinear dk(codim_, dim_, k);
      for (std::size_t flat = 0; flat < dk.block(); ++flat) {
        unflatten(flat, dim_, k, idx);
        std::fill(taken.begin(), taken.end(), 0);
        for (int p = 0; p < k; ++p) ++taken[idx[p]];
        for (const auto& term : terms_) {
          dk.at(term.output, flat) += term.coefficient * power_product(term, x, taken.data());
        }
      }
      out.derivatives.push_back(std::move(dk));
    }
    return out;
  }

 private:
  // prod_i d^{taken_i}/dx_i^{taken_i} x_i^{e_i}
  double power_product(const FunctionC4::Monomial& term, const Tensor1& x, const int* taken) const {
    double acc = 1.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      const int e = term.exponents[i];
      const int t = taken ? taken[i] : 0;
      if (t > e) return 0.0;
      for (int r = 0; r < t; ++r) acc *= static_cast<double>(e - r);
      for (int r = 0; r < e - t; ++r) acc *= x[i];
    }
    return acc;
  }

  std::size_t dim_;
  std::size_t codim_;
  std::vector<FunctionC4::Monomial> terms_;
};

// D^k [f(a.x) g(b.x)] at (i_1..i_k) = sum over subsets S of {1..k} of
// f^{(|S|)} g^{(k-|S|)} prod_{p in S} a_{i_p} prod_{p not in S} b_{i_p}.
class RidgeImpl final : public FunctionC4::Impl {
 public:
  RidgeImpl(std::size_t dim, std::size_t codim, std::vector<FunctionC4::RidgeTerm> terms)
      : dim_(dim), codim_(codim), terms_(std::move(terms)) {
    for (auto& term : terms_) {
      if (term.output >= codim_) throw std::invalid_argument("ridge output index out of range");
      if (term.a.empty()) term.a = Tensor1(dim_);
      if (term.b.empty()) term.b = Tensor1(dim_);
      require_same_dim(term.a.dim(), dim_, "ridge direction a");
      require_same_dim(term.b.dim(), dim_, "ridge direction b");
    }
  }

  Jet jet(const Tensor1& x, int max_order) const override {
    require_same_dim(x.dim(), dim_, "function argument");
    const int count = static_cast<int>(terms_.size());
    std::vector<std::array<double, kMaxDerivativeOrder + 1>> fd(count), gd(count);
    for (int t = 0; t < count; ++t) {
      const auto& term = terms_[t];
      const double u = kernels::dot(term.a.entries(), x.entries());
      const double v = kernels::dot(term.b.entries(), x.entries());
      for (int k = 0; k <= max_order; ++k) {
        fd[t][k] = term.f.derivative(k, u);
        gd[t][k] = term.g.derivative(k, v);
      }
    }

    Jet out{Tensor1(codim_), {}};
    for (int t = 0; t < count; ++t) {
      out.value[terms_[t].output] += terms_[t].coefficient * fd[t][0] * gd[t][0];
    }
    std::size_t idx[kMaxDerivativeOrder];
    for (int k = 1; k <= max_order; ++k) {
      Multilinear dk(codim_, dim_, k);
      for (std::size_t flat = 0; flat < dk.block(); ++flat) {
        unflatten(flat, dim_, k, idx);
        for (int t = 0; t < count; ++t) {
          const auto& term = terms_[t];
          double sum = 0.0;
          for (unsigned subset = 0; subset < (1u << k); ++subset) {
            const int in_f = std::popcount(subset);
            double prod = fd[t][in_f] * gd[t][k - in_f];
            if (prod == 0.0) continue;
            for (int p = 0; p < k; ++p) {
              prod *= (subset >> p & 1u) ? term.a[idx[p]] : term.b[idx[p]];
            }
            sum += prod;
          }
          dk.at(term.output, flat) += term.coefficient * sum;
        }
      }
      out.derivatives.push_back(std::move(dk));
    }
    return out;
  }

 private:
  std::size_t dim_;
  std::size_t codim_;
  std::vector<FunctionC4::RidgeTerm> terms_;
};

Tensor1 seeded_direction(std::size_t dim, const CounterRng& rng, std::uint64_t offset) {
  Tensor1 v(dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t i = 0; i < dim; ++i) v[i] = scale * rng.normal(offset + i);
  return v;
}

}  // namespace

FunctionC4::FunctionC4(std::string family, std::size_t dim, std::size_t codim,
                       std::shared_ptr<const Impl> impl)
    : family_(std::move(family)), dim_(dim), codim_(codim), impl_(std::move(impl)) {
  if (dim_ == 0 || codim_ == 0) throw DimensionError("function dimensions must be positive");
}

Jet FunctionC4::jet(const Tensor1& x, int max_order) const {
  if (max_order < 0 || max_order > kMaxDerivativeOrder) {
    throw std::invalid_argument("derivative order must be in [0, 4]");
  }
  return impl_->jet(x, max_order);
}

FunctionC4 FunctionC4::polynomial(std::size_t dim, std::size_t codim, std::vector<Monomial> terms) {
  return FunctionC4("polynomial", dim, codim,
                    std::make_shared<MonomialImpl>(dim, codim, std::move(terms)));
}

FunctionC4 FunctionC4::ridge(std::string family, std::size_t dim, std::size_t codim,
                             std::vector<RidgeTerm> terms) {
  return FunctionC4(std::move(family), dim, codim,
                    std::make_shared<RidgeImpl>(dim, codim, std::move(terms)));
}

FunctionC4 FunctionC4::linear(std::size_t dim, std::size_t codim, std::span<const double> matrix) {
  if (matrix.size() != dim * codim) throw DimensionError("linear map needs m * d entries");
  std::vector<Monomial> terms;
  for (std::size_t c = 0; c < codim; ++c) {
    for (std::size_t i = 0; i < dim; ++i) {
      std::vector<int> exps(dim, 0);
      exps[i] = 1;
      terms.push_back({c, matrix[c * dim + i], std::move(exps)});
    }
  }
  return polynomial(dim, codim, std::move(terms));
}

FunctionC4 FunctionC4::ridge_polynomial(std::size_t dim, std::size_t codim,
                                        std::vector<double> coefficients) {
  if (coefficients.empty()) throw std::invalid_argument("polynomial needs coefficients");
  std::vector<RidgeTerm> terms;
  const Tensor1 ones(dim, std::vector<double>(dim, 1.0));
  for (std::size_t c = 0; c < codim; ++c) {
    terms.push_back({c, 1.0, Profile::poly(coefficients), ones, Profile::constant_one(), {}});
  }
  return ridge("polynomial", dim, codim, std::move(terms));
}

FunctionC4 FunctionC4::random_polynomial(std::size_t dim, std::size_t codim, int degree,
                                         std::uint64_t seed) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be nonnegative");
  const CounterRng rng(seed, 0x504f4c59);
  std::vector<Monomial> terms;
  std::uint64_t counter = 0;
  std::vector<int> exps(dim, 0);
  // Enumerate exponent vectors of total degree <= degree in odometer order.
  for (std::size_t c = 0; c < codim; ++c) {
    std::fill(exps.begin(), exps.end(), 0);
    while (true) {
      int total = 0;
      for (int e : exps) total += e;
      if (total <= degree) terms.push_back({c, rng.normal(counter++), exps});
      std::size_t pos = 0;
      while (pos < dim && ++exps[pos] > degree) exps[pos++] = 0;
      if (pos == dim) break;
    }
  }
  return polynomial(dim, codim, std::move(terms));
}

FunctionC4 FunctionC4::trig_exp(std::size_t dim, std::size_t codim, std::uint64_t seed) {
  const CounterRng rng(seed, 0x545247);
  std::vector<RidgeTerm> terms;
  for (std::size_t c = 0; c < codim; ++c) {
    const std::uint64_t base = c * 2 * dim;
    terms.push_back({c, 1.0, Profile::sine(), seeded_direction(dim, rng, base),
                     Profile::constant_one(), {}});
    terms.push_back({c, 0.5, Profile::exponential(), seeded_direction(dim, rng, base + dim),
                     Profile::constant_one(), {}});
  }
  return ridge("trig-exp", dim, codim, std::move(terms));
}

FunctionC4 FunctionC4::composite(std::size_t dim, std::size_t codim, std::uint64_t seed) {
  const CounterRng rng(seed, 0x434d50);
  std::vector<RidgeTerm> terms;
  for (std::size_t c = 0; c < codim; ++c) {
    const std::uint64_t base = c * 2 * dim;
    terms.push_back({c, 1.0, Profile::sine(), seeded_direction(dim, rng, base),
                     Profile::exponential(), seeded_direction(dim, rng, base + dim)});
  }
  return ridge("composite", dim, codim, std::move(terms));
}

}  // namespace roughcalc
