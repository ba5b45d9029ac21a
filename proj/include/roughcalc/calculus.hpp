#pragma once

// Compensated Riemann sums against reduced rough paths, Young sums against
// brackets, and the Ito-formula residual with convergence-order estimates.

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "roughcalc/functions.hpp"
#include "roughcalc/paths.hpp"
#include "roughcalc/reduced.hpp"

namespace roughcalc {

struct IntegralReport {
  Tensor1 value;
  double mesh = 0.0;
  std::vector<Tensor1> terms;  // one per partition interval; value is their sum
  double observed_order = std::numeric_limits<double>::quiet_NaN();
};

// Reported when every point of a fit sits below the noise floor.
inline constexpr double kConvergedSentinel = std::numeric_limits<double>::infinity();

// Worst relative error of D^k F against central differences of D^{k-1} F,
// k = 1..4, step 1e-5 (1 + |x|).
double fd_check(const FunctionC4& f, std::span<const Tensor1> points);

// DF(X_s) X_{s,t} + D^2F(X_s) H_{s,t} + D^3F(X_s) h_{s,t} at s = t_i, t = t_j.
Tensor1 compensated_term(const FunctionC4& f, const ReducedRoughPath& r, std::size_t i,
                         std::size_t j);
Tensor1 compensated_term(const Jet& jet, const ReducedRoughPath& r, std::size_t i, std::size_t j);

struct SplitTriple {
  std::size_t s;
  std::size_t u;
  std::size_t t;
};

// Triples (start, start + w/2, start + w) with w halving from `span` indices,
// `count` triples in all.
std::vector<SplitTriple> nested_midpoint_triples(const TimeGrid& grid, std::size_t start,
                                                 std::size_t span, int count);

struct SewingProbe {
  std::vector<double> spans;
  std::vector<double> defects;
  double exponent = kConvergedSentinel;
};

// |A_{s,t} - A_{s,u} - A_{u,t}| per triple and the least-squares slope of
// log defect against log span. Defects under the noise floor are dropped from
// the fit; with fewer than two left the exponent is kConvergedSentinel.
SewingProbe sewing_defect_probe(const FunctionC4& f, const ReducedRoughPath& r,
                                std::span<const SplitTriple> triples);

// Compensated Riemann sum over the partition given by increasing grid indices.
IntegralReport rough_integral(const FunctionC4& f, const ReducedRoughPath& r,
                              std::span<const std::size_t> partition);
// Same, over the dyadic level-L partition of a dyadic grid.
IntegralReport rough_integral(const FunctionC4& f, const ReducedRoughPath& r, int level);

// t -> D^k F(X_t) sampled on a grid.
struct FormPath {
  TimeGrid grid;
  std::vector<Multilinear> forms;

  int order() const { return forms.front().order(); }
};

FormPath sample_derivative(const FunctionC4& f, const SampledPath& path, int order);

// Left-point sum  sum_i G(t_i) (b_{t_{i+1}} - b_{t_i})  with b = B.b2 for
// order-2 forms and B.b3 for order-3 forms.
IntegralReport young_integral(const FormPath& g, const BracketPath& b,
                              std::span<const std::size_t> partition);
IntegralReport young_integral(const FormPath& g, const BracketPath& b, int level);

struct ItoBreakdown {
  int level = 0;
  double mesh = 0.0;
  Tensor1 lhs;     // F(X_T) - F(X_0)
  Tensor1 rough;   // compensated sum
  Tensor1 young2;  // (1/2) sum D^2F(X_{t_i}) [X]_{t_i, t_{i+1}}
  Tensor1 young3;  // (1/6) sum D^3F(X_{t_i}) [XX]_{t_i, t_{i+1}}
  double residual = 0.0;  // |lhs - rough - young2 - young3|
  double scale = 1.0;     // max(1, |lhs|, |rough|, |young2|, |young3|)
};

ItoBreakdown ito_breakdown(const FunctionC4& f, const ReducedRoughPath& r, int level);
double ito_residual(const FunctionC4& f, const ReducedRoughPath& r, int level);

// Residuals below this are rounding noise and are left out of order fits.
double noise_floor(double scale);

struct ConvergenceRow {
  int level = 0;
  double mesh = 0.0;
  double residual = 0.0;
  double scale = 1.0;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double observed_order = kConvergedSentinel;
  // Each residual is at most its predecessor or already below the noise floor.
  bool monotone = true;
};

// ito_residual at each dyadic level in [first_level, last_level]; levels run
// concurrently, the table is ordered by level.
ConvergenceStudy convergence_study(const FunctionC4& f, const ReducedRoughPath& r,
                                   int first_level, int last_level);

// Least-squares slope of y against x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

}  // namespace roughcalc
