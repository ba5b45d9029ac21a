#include "roughcalc/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "roughcalc/random.hpp"

namespace roughcalc {
namespace {

template <int D>
bool exactly_symmetric(const Tensor<D>& t) {
  for (const Permutation<D>& sigma : all_permutations<D>()) {
    if (!(permute(t, sigma) == t)) return false;
  }
  return true;
}

// Exactly symmetric values pass through untouched; nearly symmetric ones are
// replaced by their symmetrization.
template <int D>
Path<Tensor<D>> symmetrized(const Path<Tensor<D>>& input, const char* name) {
  std::vector<Tensor<D>> values;
  values.reserve(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (exactly_symmetric(input[i])) {
      values.push_back(input[i]);
      continue;
    }
    Tensor<D> s = sym(input[i]);
    const double drift = max_abs_diff(s, input[i]);
    if (drift > kSymmetryTolerance * std::max(1.0, frobenius_norm(input[i]))) {
      throw std::invalid_argument(std::string(name) + " value at grid index " + std::to_string(i) +
                                  " is not symmetric (deviation " + format_double(drift) + ")");
    }
    values.push_back(std::move(s));
  }
  if (frobenius_norm(values.front()) != 0.0) {
    throw std::invalid_argument(std::string(name) + " must vanish at t = 0");
  }
  return Path<Tensor<D>>(input.grid(), std::move(values));
}

}  // namespace

ReducedRoughPath::ReducedRoughPath(SampledPath path, MatrixPath gamma, CubePath eta)
    : path_(std::move(path)) {
  if (!(gamma.grid() == path_.grid()) || !(eta.grid() == path_.grid())) {
    throw std::invalid_argument("reduced rough path: gamma and eta must share the path grid");
  }
  require_same_dim(gamma.dim(), path_.dim(), "reduced rough path gamma");
  require_same_dim(eta.dim(), path_.dim(), "reduced rough path eta");
  gamma_ = symmetrized(gamma, "gamma");
  eta_ = symmetrized(eta, "eta");
}

Tensor2 ReducedRoughPath::level2(std::size_t i, std::size_t j) const {
  const Tensor1 inc = x(i, j);
  Tensor2 out = gamma_.increment(i, j);
  out *= 0.5;
  add_tensor_product(0.5, inc, inc, out);
  return out;
}

Tensor3 ReducedRoughPath::level3(std::size_t i, std::size_t j) const {
  const Tensor1 inc = x(i, j);
  Tensor3 out = eta_.increment(i, j);
  out *= 1.0 / 6.0;
  const Tensor2 sq = tensor_power2(inc);
  add_tensor_product(1.0 / 6.0, sq, inc, out);
  return out;
}

bool ReducedRoughPath::gamma_constant() const {
  return std::all_of(gamma_.values().begin(), gamma_.values().end(),
                     [](const Tensor2& g) { return frobenius_norm(g) == 0.0; });
}

ReducedRoughPath canonical_reduced(const SampledPath& path) {
  return ReducedRoughPath(path, zero_gamma(path.grid(), path.dim()),
                          zero_eta(path.grid(), path.dim()));
}

ReducedRoughPath perturb(const ReducedRoughPath& base, const MatrixPath& gamma,
                         const CubePath& eta) {
  if (!(gamma.grid() == base.grid()) || !(eta.grid() == base.grid())) {
    throw std::invalid_argument("perturb: perturbation grid differs from the path grid");
  }
  // Validate the inputs on their own so a bad perturbation is reported as such.
  const ReducedRoughPath checked(base.path(), gamma, eta);
  std::vector<Tensor2> g;
  std::vector<Tensor3> e;
  g.reserve(gamma.size());
  e.reserve(eta.size());
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    g.push_back(base.gamma()[i] + checked.gamma()[i]);
    e.push_back(base.eta()[i] + checked.eta()[i]);
  }
  return ReducedRoughPath(base.path(), MatrixPath(base.grid(), std::move(g)),
                          CubePath(base.grid(), std::move(e)));
}

ReducedLevels reduced_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j) {
  ReducedLevels out{r.x(i, j), r.level2(i, j), r.level3(i, j)};
  out.norm_h2 = frobenius_norm(out.h2);
  out.norm_h3 = frobenius_norm(out.h3);
  return out;
}

void reduced_chen_defect_into(const ReducedLevels& st, const ReducedLevels& su,
                              const ReducedLevels& ut, ReducedChenWorkspace& ws) {
  const std::size_t d = st.x.dim();
  require_same_dim(su.x.dim(), d, "reduced chen defect");
  require_same_dim(ut.x.dim(), d, "reduced chen defect");
  if (ws.cross2.dim() != d) {
    ws = {Tensor2(d), Tensor3(d), Tensor3(d), {Tensor2(d), Tensor3(d)}};
  }
  const double* xl = su.x.entries().data();
  const double* xr = ut.x.entries().data();
  const double* s2 = st.h2.entries().data();
  const double* l2 = su.h2.entries().data();
  const double* r2 = ut.h2.entries().data();

  // Level 2: Sym(X_su (x) X_ut) = (X_su^a X_ut^b + X_su^b X_ut^a) / 2.
  ReducedChenDefect& out = ws.defect;
  double* o2 = out.level2.entries().data();
  double* c2 = ws.cross2.entries().data();
  double cross2_sq = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t ab = a * d + b;
      c2[ab] = 0.5 * (xl[a] * xr[b] + xl[b] * xr[a]);
      cross2_sq += c2[ab] * c2[ab];
      o2[ab] = ((s2[ab] - l2[ab]) - r2[ab]) - c2[ab];
    }
  }

  // Level 3: Sym(X_su (x) H_ut + H_su (x) X_ut).
  double* m3 = ws.mixed.entries().data();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t ab = a * d + b;
      for (std::size_t c = 0; c < d; ++c) m3[ab * d + c] = xl[a] * r2[b * d + c] + l2[ab] * xr[c];
    }
  }
  sym_into(ws.mixed, ws.cross3);
  const double* s3 = st.h3.entries().data();
  const double* l3 = su.h3.entries().data();
  const double* r3 = ut.h3.entries().data();
  const double* c3 = ws.cross3.entries().data();
  double* o3 = out.level3.entries().data();
  double cross3_sq = 0.0;
  for (std::size_t k = 0; k < ws.cross3.size(); ++k) {
    cross3_sq += c3[k] * c3[k];
    o3[k] = ((s3[k] - l3[k]) - r3[k]) - c3[k];
  }

  out.scale2 = std::max({1.0, st.norm_h2, su.norm_h2, ut.norm_h2, std::sqrt(cross2_sq)});
  out.scale3 = std::max({1.0, st.norm_h3, su.norm_h3, ut.norm_h3, std::sqrt(cross3_sq)});
}

ReducedChenDefect reduced_chen_defect(const ReducedLevels& st, const ReducedLevels& su,
                                      const ReducedLevels& ut) {
  ReducedChenWorkspace ws;
  reduced_chen_defect_into(st, su, ut, ws);
  return std::move(ws.defect);
}

ReducedChenDefect reduced_chen_defect(const ReducedRoughPath& r, std::size_t i, std::size_t u,
                                      std::size_t j) {
  if (!(i <= u && u <= j) || j >= r.grid().size()) {
    throw std::invalid_argument("reduced_chen_defect: indices must satisfy i <= u <= j < n");
  }
  return reduced_chen_defect(reduced_levels(r, i, j), reduced_levels(r, i, u),
                             reduced_levels(r, u, j));
}

BracketPath brackets(const ReducedRoughPath& r) {
  std::vector<Tensor2> b2;
  std::vector<Tensor3> b3;
  b2.reserve(r.grid().size());
  b3.reserve(r.grid().size());
  for (std::size_t i = 0; i < r.grid().size(); ++i) {
    b2.push_back(-r.gamma()[i]);
    b3.push_back(-r.eta()[i]);
  }
  return {MatrixPath(r.grid(), std::move(b2)), CubePath(r.grid(), std::move(b3))};
}

Tensor2 bracket2_from_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j) {
  Tensor2 out = tensor_power2(r.x(i, j));
  out.add_scaled(-2.0, r.level2(i, j));
  return out;
}

Tensor3 bracket3_from_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j) {
  Tensor3 out = tensor_power3(r.x(i, j));
  out.add_scaled(-6.0, r.level3(i, j));
  return out;
}

Perturbation recover_perturbation(const ReducedRoughPath& r) {
  std::vector<Tensor2> gamma;
  std::vector<Tensor3> eta;
  gamma.reserve(r.grid().size());
  eta.reserve(r.grid().size());
  for (std::size_t j = 0; j < r.grid().size(); ++j) {
    // -(X^2 - 2H) and -(X^3 - 6h) over [0, t_j].
    gamma.push_back(sym(-bracket2_from_levels(r, 0, j)));
    eta.push_back(sym(-bracket3_from_levels(r, 0, j)));
  }
  return {MatrixPath(r.grid(), std::move(gamma)), CubePath(r.grid(), std::move(eta))};
}

MatrixPath zero_gamma(const TimeGrid& grid, std::size_t dim) {
  return MatrixPath::constant(grid, Tensor2(dim));
}

CubePath zero_eta(const TimeGrid& grid, std::size_t dim) {
  return CubePath::constant(grid, Tensor3(dim));
}

namespace {

template <int D>
Path<Tensor<D>> linear_path(const TimeGrid& grid, const Tensor<D>& slope) {
  std::vector<Tensor<D>> values;
  values.reserve(grid.size());
  for (double t : grid.times()) values.push_back(t * slope);
  return Path<Tensor<D>>(grid, std::move(values));
}

template <int D>
Tensor<D> seeded_symmetric(std::size_t dim, const CounterRng& rng, std::uint64_t offset) {
  Tensor<D> raw(dim);
  for (std::size_t k = 0; k < raw.size(); ++k) raw[k] = rng.normal(offset + k);
  Tensor<D> s = sym(raw);
  const double norm = frobenius_norm(s);
  if (norm > 0.0) s *= 1.0 / norm;
  return s;
}

template <int D>
Path<Tensor<D>> lipschitz_path(const TimeGrid& grid, std::size_t dim, double amplitude,
                               std::uint64_t seed, std::uint64_t stream) {
  const CounterRng rng(seed, stream);
  constexpr int kModes = 3;
  std::vector<Tensor<D>> modes;
  std::vector<double> phases;
  const std::uint64_t block = Tensor<D>::flat_size(dim) + 1;
  for (int r = 0; r < kModes; ++r) {
    modes.push_back(seeded_symmetric<D>(dim, rng, r * block));
    phases.push_back(2.0 * 3.14159265358979323846 * rng.uniform(r * block + block - 1));
  }
  std::vector<Tensor<D>> values;
  values.reserve(grid.size());
  for (double t : grid.times()) {
    Tensor<D> v(dim);
    for (int r = 0; r < kModes; ++r) {
      const double freq = r + 1.0;
      const double weight = amplitude * (std::sin(freq * t + phases[r]) - std::sin(phases[r])) / freq;
      v.add_scaled(weight, modes[r]);
    }
    values.push_back(std::move(v));
  }
  return Path<Tensor<D>>(grid, std::move(values));
}

}  // namespace

MatrixPath linear_gamma(const TimeGrid& grid, const Tensor2& slope) {
  return linear_path(grid, slope);
}

CubePath linear_eta(const TimeGrid& grid, const Tensor3& slope) { return linear_path(grid, slope); }

MatrixPath lipschitz_gamma(const TimeGrid& grid, std::size_t dim, double amplitude,
                           std::uint64_t seed) {
  return lipschitz_path<2>(grid, dim, amplitude, seed, 0x47414d);
}

CubePath lipschitz_eta(const TimeGrid& grid, std::size_t dim, double amplitude,
                       std::uint64_t seed) {
  return lipschitz_path<3>(grid, dim, amplitude, seed, 0x455441);
}

}  // namespace roughcalc
