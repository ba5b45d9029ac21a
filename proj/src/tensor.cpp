#include "roughcalc/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "roughcalc/kernels.hpp"

namespace roughcalc {

void throw_dimension_mismatch(std::size_t a, std::size_t b, const char* what) {
  throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                       std::to_string(b) + ")");
}

template <int D>
Tensor<D>& Tensor<D>::operator+=(const Tensor& other) {
  return add_scaled(1.0, other);
}

template <int D>
Tensor<D>& Tensor<D>::operator-=(const Tensor& other) {
  return add_scaled(-1.0, other);
}

template <int D>
Tensor<D>& Tensor<D>::operator*=(double scale) {
  for (double& e : entries_) e *= scale;
  return *this;
}

template <int D>
Tensor<D>& Tensor<D>::add_scaled(double scale, const Tensor& other) {
  require_same_dim(dim_, other.dim_, "tensor sum");
  if (&other == this) {
    for (double& e : entries_) e += scale * e;
    return *this;
  }
  double* __restrict y = entries_.data();
  const double* __restrict x = other.entries_.data();
  const std::size_t n = entries_.size();
  if (scale == 1.0) {
    for (std::size_t i = 0; i < n; ++i) y[i] += x[i];
  } else if (scale == -1.0) {
    for (std::size_t i = 0; i < n; ++i) y[i] -= x[i];
  } else {
    kernels::axpy(scale, other.entries_, entries_);
  }
  return *this;
}

template class Tensor<1>;
template class Tensor<2>;
template class Tensor<3>;

Tensor1 make_vector(std::initializer_list<double> entries) {
  return Tensor1(entries.size(), std::vector<double>(entries));
}

void add_tensor_product(double scale, const Tensor1& a, const Tensor1& b, Tensor2& out) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  require_same_dim(a.dim(), out.dim(), "tensor product");
  kernels::outer_acc(scale, a.entries(), b.entries(), out.entries());
}

void add_tensor_product(double scale, const Tensor1& a, const Tensor2& b, Tensor3& out) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  require_same_dim(a.dim(), out.dim(), "tensor product");
  kernels::outer_acc(scale, a.entries(), b.entries(), out.entries());
}

void add_tensor_product(double scale, const Tensor2& a, const Tensor1& b, Tensor3& out) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  require_same_dim(a.dim(), out.dim(), "tensor product");
  kernels::outer_acc(scale, a.entries(), b.entries(), out.entries());
}

Tensor2 tensor_product(const Tensor1& a, const Tensor1& b) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  Tensor2 out(a.dim());
  add_tensor_product(1.0, a, b, out);
  return out;
}

Tensor3 tensor_product(const Tensor1& a, const Tensor2& b) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  Tensor3 out(a.dim());
  add_tensor_product(1.0, a, b, out);
  return out;
}

Tensor3 tensor_product(const Tensor2& a, const Tensor1& b) {
  require_same_dim(a.dim(), b.dim(), "tensor product");
  Tensor3 out(a.dim());
  add_tensor_product(1.0, a, b, out);
  return out;
}

Tensor2 tensor_power2(const Tensor1& v) { return tensor_product(v, v); }

Tensor3 tensor_power3(const Tensor1& v) { return tensor_product(tensor_product(v, v), v); }

template <int N>
std::vector<Permutation<N>> all_permutations() {
  std::vector<Permutation<N>> out;
  Permutation<N> p = identity_permutation<N>();
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

template std::vector<Permutation<2>> all_permutations<2>();
template std::vector<Permutation<3>> all_permutations<3>();

Tensor2 permute(const Tensor2& t, const Permutation<2>& sigma) {
  if (!is_permutation<2>(sigma)) throw std::invalid_argument("permute: not a permutation of {0,1}");
  const std::size_t d = t.dim();
  Tensor2 out(d);
  std::array<std::size_t, 2> idx{};
  for (idx[0] = 0; idx[0] < d; ++idx[0]) {
    for (idx[1] = 0; idx[1] < d; ++idx[1]) {
      out.at(idx) = t.at({idx[sigma[0]], idx[sigma[1]]});
    }
  }
  return out;
}

Tensor3 permute(const Tensor3& t, const Permutation<3>& sigma) {
  if (!is_permutation<3>(sigma)) {
    throw std::invalid_argument("permute: not a permutation of {0,1,2}");
  }
  const std::size_t d = t.dim();
  Tensor3 out(d);
  std::array<std::size_t, 3> idx{};
  for (idx[0] = 0; idx[0] < d; ++idx[0]) {
    for (idx[1] = 0; idx[1] < d; ++idx[1]) {
      for (idx[2] = 0; idx[2] < d; ++idx[2]) {
        out.at(idx) = t.at({idx[sigma[0]], idx[sigma[1]], idx[sigma[2]]});
      }
    }
  }
  return out;
}

void sym_into(const Tensor2& t, Tensor2& out) {
  const std::size_t d = t.dim();
  require_same_dim(d, out.dim(), "sym");
  const double* e = t.entries().data();
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out[i * d + j] = 0.5 * (e[i * d + j] + e[j * d + i]);
  }
}

// One value per sorted index triple, so the result is exactly symmetric. The
// six terms are summed in sorted order, which makes the result invariant
// under permuting the input; all-equal terms return that value unchanged.
namespace {

// Twelve-comparator sorting network.
inline void sort6(std::array<double, 6>& a) {
  constexpr int pairs[12][2] = {{0, 5}, {1, 3}, {2, 4}, {1, 2}, {3, 4}, {0, 3},
                                {2, 5}, {0, 1}, {2, 3}, {4, 5}, {1, 2}, {3, 4}};
  for (const auto& p : pairs) {
    const double lo = std::min(a[p[0]], a[p[1]]);
    const double hi = std::max(a[p[0]], a[p[1]]);
    a[p[0]] = lo;
    a[p[1]] = hi;
  }
}

}  // namespace

void sym_into(const Tensor3& t, Tensor3& out) {
  const std::size_t d = t.dim();
  require_same_dim(d, out.dim(), "sym");
  const double* e = t.entries().data();
  auto idx = [d](std::size_t a, std::size_t b, std::size_t c) { return (a * d + b) * d + c; };
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      for (std::size_t k = j; k < d; ++k) {
        std::array<double, 6> terms = {e[idx(i, j, k)], e[idx(i, k, j)], e[idx(j, i, k)],
                                       e[idx(j, k, i)], e[idx(k, i, j)], e[idx(k, j, i)]};
        sort6(terms);
        const double v = terms[0] == terms[5]
                             ? terms[0]
                             : (((terms[0] + terms[1]) + (terms[2] + terms[3])) +
                                (terms[4] + terms[5])) / 6.0;
        out[idx(i, j, k)] = v;
        out[idx(i, k, j)] = v;
        out[idx(j, i, k)] = v;
        out[idx(j, k, i)] = v;
        out[idx(k, i, j)] = v;
        out[idx(k, j, i)] = v;
      }
    }
  }
}

Tensor2 sym(const Tensor2& t) {
  Tensor2 out(t.dim());
  sym_into(t, out);
  return out;
}

Tensor3 sym(const Tensor3& t) {
  Tensor3 out(t.dim());
  sym_into(t, out);
  return out;
}

Tensor2 p1(const Tensor2& t) {
  const std::size_t d = t.dim();
  Tensor2 out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) out.at({i, j}) = t.at({i, j}) + t.at({j, i});
  }
  return out;
}

// On a basis tensor T = w1 w2 w3 the entry (i,j,k) of w3 w1 w2 is T(j,k,i),
// of w2 w1 w3 is T(j,i,k), and so on.
Tensor3 p2(const Tensor3& t) {
  const std::size_t d = t.dim();
  Tensor3 out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        out.at({i, j, k}) = t.at({i, j, k}) + t.at({j, i, k}) + t.at({j, k, i});
      }
    }
  }
  return out;
}

Tensor3 p3(const Tensor3& t) {
  const std::size_t d = t.dim();
  Tensor3 out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        out.at({i, j, k}) = t.at({i, j, k}) + t.at({i, k, j}) + t.at({k, i, j});
      }
    }
  }
  return out;
}

template <int D>
double frobenius_norm(const Tensor<D>& t) {
  return std::sqrt(kernels::dot(t.entries(), t.entries()));
}

template <int D>
double max_abs_diff(const Tensor<D>& a, const Tensor<D>& b) {
  require_same_dim(a.dim(), b.dim(), "tensor comparison");
  return kernels::max_abs_diff(a.entries(), b.entries());
}

template <int D>
bool approx_equal(const Tensor<D>& a, const Tensor<D>& b, double tol) {
  if (a.dim() != b.dim()) return false;
  const double scale = std::max({1.0, frobenius_norm(a), frobenius_norm(b)});
  return max_abs_diff(a, b) <= tol * scale;
}

template <int D>
bool is_symmetric(const Tensor<D>& t, double tol) {
  if constexpr (D == 1) {
    return true;
  } else {
    return max_abs_diff(t, sym(t)) <= tol * std::max(1.0, frobenius_norm(t));
  }
}

#define ROUGHCALC_INSTANTIATE(D)                                              \
  template double frobenius_norm<D>(const Tensor<D>&);                        \
  template double max_abs_diff<D>(const Tensor<D>&, const Tensor<D>&);        \
  template bool approx_equal<D>(const Tensor<D>&, const Tensor<D>&, double);  \
  template bool is_symmetric<D>(const Tensor<D>&, double);

ROUGHCALC_INSTANTIATE(1)
ROUGHCALC_INSTANTIATE(2)
ROUGHCALC_INSTANTIATE(3)

#undef ROUGHCALC_INSTANTIATE

}  // namespace roughcalc
