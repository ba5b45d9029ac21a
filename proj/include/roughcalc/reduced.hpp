#pragma once

// Reduced rough paths (X, H, h) stored as the underlying path X together with
// one-parameter perturbation paths gamma (symmetric 2-tensors) and eta
// (symmetric 3-tensors):
//
//   H_{s,t} = X_{s,t}^2 / 2 + (gamma_t - gamma_s) / 2
//   h_{s,t} = X_{s,t}^3 / 6 + (eta_t - eta_s) / 6
//
// Every reduced rough path above X has this form, and storing (gamma, eta)
// rather than two-parameter tables makes the brackets additive exactly.

#include <cstddef>
#include <cstdint>

#include "roughcalc/paths.hpp"
#include "roughcalc/tensor.hpp"

namespace roughcalc {

// Inputs whose symmetrization moves an entry by more than this are rejected.
inline constexpr double kSymmetryTolerance = 1e-9;

class ReducedRoughPath {
 public:
  ReducedRoughPath(SampledPath path, MatrixPath gamma, CubePath eta);

  const SampledPath& path() const { return path_; }
  const MatrixPath& gamma() const { return gamma_; }
  const CubePath& eta() const { return eta_; }
  const TimeGrid& grid() const { return path_.grid(); }
  std::size_t dim() const { return path_.dim(); }

  Tensor1 x(std::size_t i, std::size_t j) const { return path_.increment(i, j); }
  Tensor2 level2(std::size_t i, std::size_t j) const;  // H_{t_i, t_j}
  Tensor3 level3(std::size_t i, std::size_t j) const;  // h_{t_i, t_j}

  // True when every gamma value equals gamma_0 = 0.
  bool gamma_constant() const;

 private:
  SampledPath path_;
  MatrixPath gamma_;
  CubePath eta_;
};

// gamma = eta = 0: H = X^2 / 2, h = X^3 / 6.
ReducedRoughPath canonical_reduced(const SampledPath& path);

// Adds (gamma, eta) to the stored perturbations of `base`.
ReducedRoughPath perturb(const ReducedRoughPath& base, const MatrixPath& gamma,
                         const CubePath& eta);

struct ReducedChenDefect {
  Tensor2 level2;
  Tensor3 level3;
  double scale2 = 1.0;
  double scale3 = 1.0;

  double relative2() const { return frobenius_norm(level2) / scale2; }
  double relative3() const { return frobenius_norm(level3) / scale3; }
};

// (X, H, h) over one interval with the Frobenius norms of H and h.
struct ReducedLevels {
  Tensor1 x;
  Tensor2 h2;
  Tensor3 h3;
  double norm_h2 = 0.0;
  double norm_h3 = 0.0;
};

ReducedLevels reduced_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j);

// (H_{s,t} - H_{s,u} - H_{u,t} - Sym(X_{s,u} X_{u,t}),
//  h_{s,t} - h_{s,u} - h_{u,t} - Sym(X_{s,u} H_{u,t} + H_{s,u} X_{u,t})), i <= u <= j.
// The level-3 component picks up -Sym(X_{s,u} dgamma_{u,t} + dgamma_{s,u} X_{u,t}) / 2
// when gamma is not constant.
ReducedChenDefect reduced_chen_defect(const ReducedRoughPath& r, std::size_t i, std::size_t u,
                                      std::size_t j);
ReducedChenDefect reduced_chen_defect(const ReducedLevels& st, const ReducedLevels& su,
                                      const ReducedLevels& ut);

// Scratch storage for repeated defect evaluation; sized on first use.
struct ReducedChenWorkspace {
  Tensor2 cross2;
  Tensor3 mixed;
  Tensor3 cross3;
  ReducedChenDefect defect;
};

// ws.defect <- reduced_chen_defect(st, su, ut).
void reduced_chen_defect_into(const ReducedLevels& st, const ReducedLevels& su,
                              const ReducedLevels& ut, ReducedChenWorkspace& ws);

// One-parameter bracket processes: [X]_{s,t} = b2_t - b2_s, [XX]_{s,t} = b3_t - b3_s.
struct BracketPath {
  MatrixPath b2;
  CubePath b3;

  const TimeGrid& grid() const { return b2.grid(); }
  Tensor2 bracket2(std::size_t i, std::size_t j) const { return b2.increment(i, j); }
  Tensor3 bracket3(std::size_t i, std::size_t j) const { return b3.increment(i, j); }
};

BracketPath brackets(const ReducedRoughPath& r);

// X_{s,t}^2 - 2 H_{s,t} and X_{s,t}^3 - 6 h_{s,t}, evaluated from the levels.
Tensor2 bracket2_from_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j);
Tensor3 bracket3_from_levels(const ReducedRoughPath& r, std::size_t i, std::size_t j);

struct Perturbation {
  MatrixPath gamma;
  CubePath eta;
};

// gamma_t = 2 (H_{0,t} - X_{0,t}^2 / 2), eta_t = 6 (h_{0,t} - X_{0,t}^3 / 6),
// computed from the levels; normalized by gamma_0 = eta_0 = 0.
Perturbation recover_perturbation(const ReducedRoughPath& r);

// Perturbation generators.
MatrixPath zero_gamma(const TimeGrid& grid, std::size_t dim);
CubePath zero_eta(const TimeGrid& grid, std::size_t dim);

// gamma_t = t M with M symmetric.
MatrixPath linear_gamma(const TimeGrid& grid, const Tensor2& slope);
// eta_t = t S with S symmetric.
CubePath linear_eta(const TimeGrid& grid, const Tensor3& slope);

// Smooth (hence Lipschitz) seeded perturbations:
// sum_{r=1}^{3} amplitude (sin(r t + phi_r) - sin(phi_r)) M_r / r with M_r
// seeded symmetric tensors of unit Frobenius norm.
MatrixPath lipschitz_gamma(const TimeGrid& grid, std::size_t dim, double amplitude,
                           std::uint64_t seed);
CubePath lipschitz_eta(const TimeGrid& grid, std::size_t dim, double amplitude,
                       std::uint64_t seed);

}  // namespace roughcalc
