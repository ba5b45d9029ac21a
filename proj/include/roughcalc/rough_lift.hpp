#pragma once

// Step-3 rough paths above sampled paths: the canonical lift of the
// piecewise-linear interpolation, Chen composition, and validators for the
// Chen and shuffle relations.

#include <cstddef>
#include <vector>

#include "roughcalc/paths.hpp"
#include "roughcalc/tensor.hpp"

namespace roughcalc {

// Levels (X_{s,t}, XX_{s,t}, XXX_{s,t}) of one interval.
struct LevelTriple {
  Tensor1 x;
  Tensor2 x2;
  Tensor3 x3;

  static LevelTriple zero(std::size_t dim) { return {Tensor1(dim), Tensor2(dim), Tensor3(dim)}; }
  std::size_t dim() const { return x.dim(); }
  bool operator==(const LevelTriple&) const = default;
};

// (v, v^2 / 2, v^3 / 6): the levels of a straight segment with increment v.
LevelTriple segment_signature(const Tensor1& v);

// Levels over [s, t] from those over [s, u] and [u, t].
LevelTriple chen_compose(const LevelTriple& left, const LevelTriple& right);

// left <- chen_compose(left, right), without temporaries.
void chen_compose_into(LevelTriple& left, const LevelTriple& right);

// Frobenius norms of the three levels.
struct LevelNorms {
  double x = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

LevelNorms level_norms(const LevelTriple& levels);

class RoughPath3 {
 public:
  // `adjacent[i]` holds the levels over [t_i, t_{i+1}]. Any values are
  // accepted so validators can be exercised on non-geometric data.
  RoughPath3(TimeGrid grid, std::vector<LevelTriple> adjacent);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return adjacent_.front().dim(); }
  const std::vector<LevelTriple>& adjacent() const { return adjacent_; }

  // Left-to-right fold of the adjacent triples over [t_i, t_j]; i <= j.
  LevelTriple evaluate(std::size_t i, std::size_t j) const;

 private:
  TimeGrid grid_;
  std::vector<LevelTriple> adjacent_;
};

RoughPath3 lift_piecewise_linear(const SampledPath& path);

// evaluate(i, j) for every pair i <= j, built with the same left fold so
// entries agree bit-for-bit with RoughPath3::evaluate. Memory is
// O(n^2 d^3); meant for exhaustive validation on small grids.
class LiftTable {
 public:
  explicit LiftTable(const RoughPath3& rp);

  std::size_t size() const { return n_; }
  const LevelTriple& at(std::size_t i, std::size_t j) const;
  const LevelNorms& norms(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_;
  std::vector<std::vector<LevelTriple>> rows_;  // rows_[i][j - i]
  std::vector<std::vector<LevelNorms>> norms_;
};

struct ChenDefect {
  Tensor2 level2;
  Tensor3 level3;
  // Largest operand norm entering each identity, floored at 1.
  double scale2 = 1.0;
  double scale3 = 1.0;

  double relative2() const { return frobenius_norm(level2) / scale2; }
  double relative3() const { return frobenius_norm(level3) / scale3; }
};

// Residuals of the Chen relation at s = t_i, u = t_u, t = t_j (i <= u <= j).
ChenDefect chen_defect(const RoughPath3& rp, std::size_t i, std::size_t u, std::size_t j);
ChenDefect chen_defect(const LiftTable& table, std::size_t i, std::size_t u, std::size_t j);
ChenDefect chen_defect(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut);
// Same, reusing the storage already held by `out`; the norms, when given,
// must be level_norms of the corresponding triples.
void chen_defect_into(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut,
                      ChenDefect& out);
void chen_defect_into(const LevelTriple& st, const LevelTriple& su, const LevelTriple& ut,
                      const LevelNorms& nst, const LevelNorms& nsu, const LevelNorms& nut,
                      ChenDefect& out);

struct ShuffleDefect {
  Tensor2 first;   // X (x) X - P1(XX)
  Tensor3 second;  // X (x) XX - P2(XXX)
  Tensor3 third;   // XX (x) X - P3(XXX)
  double scale2 = 1.0;
  double scale3 = 1.0;

  double relative_first() const { return frobenius_norm(first) / scale2; }
  double relative_second() const { return frobenius_norm(second) / scale3; }
  double relative_third() const { return frobenius_norm(third) / scale3; }
};

// Residuals of the shuffle relation over [t_i, t_j]; i < j.
ShuffleDefect shuffle_defect(const RoughPath3& rp, std::size_t i, std::size_t j);
ShuffleDefect shuffle_defect(const LevelTriple& levels);

}  // namespace roughcalc
