#include "roughcalc/rough_lift.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace roughcalc {

LevelTriple segment_signature(const Tensor1& v) {
  LevelTriple out = LevelTriple::zero(v.dim());
  out.x = v;
  add_tensor_product(0.5, v, v, out.x2);
  add_tensor_product(1.0 / 3.0, v, out.x2, out.x3);
  return out;
}

void chen_compose_into(LevelTriple& left, const LevelTriple& right) {
  require_same_dim(left.dim(), right.dim(), "chen_compose");
  // Level 3 first: it reads the old level-1 and level-2 values of `left`.
  left.x3 += right.x3;
  add_tensor_product(1.0, left.x, right.x2, left.x3);
  add_tensor_product(1.0, left.x2, right.x, left.x3);
  left.x2 += right.x2;
  add_tensor_product(1.0, left.x, right.x, left.x2);
  left.x += right.x;
}

LevelTriple chen_compose(const LevelTriple& left, const LevelTriple& right) {
  LevelTriple out = left;
  chen_compose_into(out, right);
  return out;
}

RoughPath3::RoughPath3(TimeGrid grid, std::vector<LevelTriple> adjacent)
    : grid_(std::move(grid)), adjacent_(std::move(adjacent)) {
  if (adjacent_.size() != grid_.intervals()) {
    throw std::invalid_argument("rough path needs one level triple per grid interval");
  }
  for (const LevelTriple& t : adjacent_) {
    require_same_dim(t.x.dim(), adjacent_.front().dim(), "rough path");
    require_same_dim(t.x2.dim(), t.x.dim(), "rough path level 2");
    require_same_dim(t.x3.dim(), t.x.dim(), "rough path level 3");
  }
}

LevelTriple RoughPath3::evaluate(std::size_t i, std::size_t j) const {
  if (i > j || j >= grid_.size()) {
    throw std::out_of_range("rough path evaluate: need i <= j < " + std::to_string(grid_.size()));
  }
  LevelTriple acc = LevelTriple::zero(dim());
  for (std::size_t k = i; k < j; ++k) chen_compose_into(acc, adjacent_[k]);
  return acc;
}

RoughPath3 lift_piecewise_linear(const SampledPath& path) {
  std::vector<LevelTriple> adjacent;
  adjacent.reserve(path.size() - 1);
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    adjacent.push_back(segment_signature(path.increment(i, i + 1)));
  }
  return RoughPath3(path.grid(), std::move(adjacent));
}

LevelNorms level_norms(const LevelTriple& levels) {
  return {frobenius_norm(levels.x), frobenius_norm(levels.x2), frobenius_norm(levels.x3)};
}

LiftTable::LiftTable(const RoughPath3& rp) : n_(rp.grid().size()), rows_(n_), norms_(n_) {
  const std::size_t d = rp.dim();
  for (std::size_t i = 0; i < n_; ++i) {
    std::vector<LevelTriple>& row = rows_[i];
    row.reserve(n_ - i);
    row.push_back(LevelTriple::zero(d));
    for (std::size_t j = i + 1; j < n_; ++j) {
      LevelTriple next = row.back();
      chen_compose_into(next, rp.adjacent()[j - 1]);
      row.push_back(std::move(next));
    }
    norms_[i].reserve(row.size());
    for (const LevelTriple& levels : row) norms_[i].push_back(level_norms(levels));
  }
}

const LevelTriple& LiftTable::at(std::size_t i, std::size_t j) const {
  if (i > j || j >= n_) throw std::out_of_range("lift table: need i <= j < n");
  return rows_[i][j - i];
}

const LevelNorms& LiftTable::norms(std::size_t i, std::size_t j) const {
  if (i > j || j >= n_) throw std::out_of_range("lift table: need i <= j < n");
  return norms_[i][j - i];
}

void chen_defect_into(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut,
                      ChenDefect& out) {
  chen_defect_into(st, su, ut, level_norms(st), level_norms(su), level_norms(ut), out);
}

void chen_defect_into(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut,
                      const LevelNorms& nst, const LevelNorms& nsu, const LevelNorms& nut,
                      ChenDefect& out) {
  const std::size_t d = st.dim();
  require_same_dim(su.dim(), d, "chen defect");
  require_same_dim(ut.dim(), d, "chen defect");
  if (out.level2.dim() != d) out.level2 = Tensor2(d);
  if (out.level3.dim() != d) out.level3 = Tensor3(d);

  // One fused pass per level; the cross terms are the Chen products
  // X_su (x) X_ut, X_su (x) XX_ut and XX_su (x) X_ut.
  const double* xl = su.x.entries().data();
  const double* xr = ut.x.entries().data();
  const double* s2 = st.x2.entries().data();
  const double* l2 = su.x2.entries().data();
  const double* r2 = ut.x2.entries().data();
  double* o2 = out.level2.entries().data();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t ab = a * d + b;
      o2[ab] = ((s2[ab] - l2[ab]) - r2[ab]) - xl[a] * xr[b];
    }
  }
  const double* s3 = st.x3.entries().data();
  const double* l3 = su.x3.entries().data();
  const double* r3 = ut.x3.entries().data();
  double* o3 = out.level3.entries().data();
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t ab = a * d + b;
      for (std::size_t c = 0; c < d; ++c) {
        const std::size_t abc = ab * d + c;
        o3[abc] = (((s3[abc] - l3[abc]) - r3[abc]) - xl[a] * r2[b * d + c]) - l2[ab] * xr[c];
      }
    }
  }

  out.scale2 = std::max({1.0, nst.x2, nsu.x2, nut.x2, nsu.x * nut.x});
  out.scale3 = std::max({1.0, nst.x3, nsu.x3, nut.x3, nsu.x * nut.x2, nsu.x2 * nut.x});
}

ChenDefect chen_defect(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut) {
  ChenDefect out;
  chen_defect_into(st, su, ut, out);
  return out;
}

namespace {

void check_split(std::size_t i, std::size_t u, std::size_t j, std::size_t n) {
  if (!(i <= u && u <= j) || j >= n) {
    throw std::invalid_argument("chen_defect: indices must satisfy i <= u <= j < " +
                                std::to_string(n));
  }
}

}  // namespace

ChenDefect chen_defect(const RoughPath3& rp, std::size_t i, std::size_t u, std::size_t j) {
  check_split(i, u, j, rp.grid().size());
  return chen_defect(rp.evaluate(i, j), rp.evaluate(i, u), rp.evaluate(u, j));
}

ChenDefect chen_defect(const LiftTable& table, std::size_t i, std::size_t u, std::size_t j) {
  check_split(i, u, j, table.size());
  return chen_defect(table.at(i, j), table.at(i, u), table.at(u, j));
}

ShuffleDefect shuffle_defect(const LevelTriple& levels) {
  ShuffleDefect out{-p1(levels.x2), -p2(levels.x3), -p3(levels.x3)};
  add_tensor_product(1.0, levels.x, levels.x, out.first);
  add_tensor_product(1.0, levels.x, levels.x2, out.second);
  add_tensor_product(1.0, levels.x2, levels.x, out.third);

  const double nx = frobenius_norm(levels.x);
  const double nx2 = frobenius_norm(levels.x2);
  out.scale2 = std::max({1.0, nx * nx, nx2});
  out.scale3 = std::max({1.0, nx * nx2, frobenius_norm(levels.x3)});
  return out;
}

ShuffleDefect shuffle_defect(const RoughPath3& rp, std::size_t i, std::size_t j) {
  if (!(i < j) || j >= rp.grid().size()) {
    throw std::invalid_argument("shuffle_defect: indices must satisfy i < j < n");
  }
  return shuffle_defect(rp.evaluate(i, j));
}

}  // namespace roughcalc
