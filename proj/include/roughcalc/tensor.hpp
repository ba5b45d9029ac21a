#pragma once

// Dense tensors of degree 1..3 over R^d.
//
// Entries are stored row-major: for a degree-3 tensor the entry (i, j, k)
// lives at ((i * d) + j) * d + k and is the coefficient of e_i (x) e_j (x) e_k.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roughcalc {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[noreturn]] void throw_dimension_mismatch(std::size_t a, std::size_t b, const char* what);

inline void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) [[unlikely]] throw_dimension_mismatch(a, b, what);
}

template <int Degree>
class Tensor {
  static_assert(Degree >= 1 && Degree <= 3, "tensor degree must be 1, 2 or 3");

 public:
  static constexpr int degree = Degree;

  Tensor() = default;

  explicit Tensor(std::size_t dim) : dim_(dim), entries_(flat_size(dim), 0.0) {
    if (dim == 0) throw DimensionError("tensor dimension must be positive");
  }

  Tensor(std::size_t dim, std::vector<double> entries) : dim_(dim), entries_(std::move(entries)) {
    if (dim == 0) throw DimensionError("tensor dimension must be positive");
    if (entries_.size() != flat_size(dim)) {
      throw DimensionError("tensor of degree " + std::to_string(Degree) + " over R^" +
                           std::to_string(dim) + " needs " + std::to_string(flat_size(dim)) +
                           " entries, got " + std::to_string(entries_.size()));
    }
  }

  // Tensor product of basis vectors e_{i_1} (x) ... (x) e_{i_n}, 0-based indices.
  static Tensor basis(std::size_t dim, const std::array<std::size_t, Degree>& index) {
    Tensor t(dim);
    t.at(index) = 1.0;
    return t;
  }

  static constexpr std::size_t flat_size(std::size_t dim) {
    std::size_t n = 1;
    for (int k = 0; k < Degree; ++k) n *= dim;
    return n;
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  std::span<const double> entries() const { return entries_; }
  std::span<double> entries() { return entries_; }

  double& operator[](std::size_t flat) { return entries_[flat]; }
  double operator[](std::size_t flat) const { return entries_[flat]; }

  double& at(const std::array<std::size_t, Degree>& index) { return entries_[offset(index)]; }
  double at(const std::array<std::size_t, Degree>& index) const {
    return entries_[offset(index)];
  }

  std::size_t offset(const std::array<std::size_t, Degree>& index) const {
    std::size_t flat = 0;
    for (int k = 0; k < Degree; ++k) {
      if (index[k] >= dim_) throw std::out_of_range("tensor index out of range");
      flat = flat * dim_ + index[k];
    }
    return flat;
  }

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double scale);

  // this += scale * other
  Tensor& add_scaled(double scale, const Tensor& other);

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

using Tensor1 = Tensor<1>;
using Tensor2 = Tensor<2>;
using Tensor3 = Tensor<3>;

template <int D>
Tensor<D> operator+(Tensor<D> a, const Tensor<D>& b) {
  a += b;
  return a;
}
template <int D>
Tensor<D> operator-(Tensor<D> a, const Tensor<D>& b) {
  a -= b;
  return a;
}
template <int D>
Tensor<D> operator*(double s, Tensor<D> a) {
  a *= s;
  return a;
}
template <int D>
Tensor<D> operator-(Tensor<D> a) {
  a *= -1.0;
  return a;
}

Tensor1 make_vector(std::initializer_list<double> entries);

// a (x) b; the degrees must add up to at most 3.
Tensor2 tensor_product(const Tensor1& a, const Tensor1& b);
Tensor3 tensor_product(const Tensor1& a, const Tensor2& b);
Tensor3 tensor_product(const Tensor2& a, const Tensor1& b);

// out += scale * (a (x) b), with out preallocated.
void add_tensor_product(double scale, const Tensor1& a, const Tensor1& b, Tensor2& out);
void add_tensor_product(double scale, const Tensor1& a, const Tensor2& b, Tensor3& out);
void add_tensor_product(double scale, const Tensor2& a, const Tensor1& b, Tensor3& out);

Tensor2 tensor_power2(const Tensor1& v);
Tensor3 tensor_power3(const Tensor1& v);

// A permutation of {0, ..., N-1} given by its images: sigma[k] = sigma(k).
template <int N>
using Permutation = std::array<int, N>;

template <int N>
bool is_permutation(const Permutation<N>& sigma) {
  std::array<bool, N> seen{};
  for (int image : sigma) {
    if (image < 0 || image >= N || seen[image]) return false;
    seen[image] = true;
  }
  return true;
}

// (tau sigma)(k) = tau(sigma(k)); acting by the product equals acting by sigma first.
template <int N>
Permutation<N> compose(const Permutation<N>& tau, const Permutation<N>& sigma) {
  Permutation<N> out{};
  for (int k = 0; k < N; ++k) out[k] = tau[sigma[k]];
  return out;
}

template <int N>
constexpr Permutation<N> identity_permutation() {
  Permutation<N> id{};
  for (int k = 0; k < N; ++k) id[k] = k;
  return id;
}

// All N! permutations in lexicographic order of their image arrays.
template <int N>
std::vector<Permutation<N>> all_permutations();

// Symmetric-group action: the factor in slot k moves to slot sigma(k), i.e.
// sigma . (w_1 (x) ... (x) w_n) = w_{sigma^-1(1)} (x) ... (x) w_{sigma^-1(n)}.
Tensor2 permute(const Tensor2& t, const Permutation<2>& sigma);
Tensor3 permute(const Tensor3& t, const Permutation<3>& sigma);

Tensor2 sym(const Tensor2& t);
Tensor3 sym(const Tensor3& t);
// out <- sym(t); out must not alias t.
void sym_into(const Tensor2& t, Tensor2& out);
void sym_into(const Tensor3& t, Tensor3& out);

// w1 w2 -> w1 w2 + w2 w1
Tensor2 p1(const Tensor2& t);
// w1 w2 w3 -> w1 w2 w3 + w2 w1 w3 + w3 w1 w2
Tensor3 p2(const Tensor3& t);
// w1 w2 w3 -> w1 w2 w3 + w1 w3 w2 + w2 w3 w1
Tensor3 p3(const Tensor3& t);

template <int D>
double frobenius_norm(const Tensor<D>& t);

template <int D>
double max_abs_diff(const Tensor<D>& a, const Tensor<D>& b);

inline constexpr double kDefaultRelTol = 1e-12;

// max |a - b| <= tol * max(1, |a|, |b|)
template <int D>
bool approx_equal(const Tensor<D>& a, const Tensor<D>& b, double tol = kDefaultRelTol);

// True when t equals sym(t) up to tol * max(1, |t|).
template <int D>
bool is_symmetric(const Tensor<D>& t, double tol = kDefaultRelTol);

}  // namespace roughcalc
