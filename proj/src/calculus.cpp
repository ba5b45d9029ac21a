#include "roughcalc/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "roughcalc/parallel.hpp"

namespace roughcalc {
namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

void check_partition(std::span<const std::size_t> partition, std::size_t grid_size) {
  if (partition.size() < 2) throw std::invalid_argument("partition needs at least two points");
  for (std::size_t k = 0; k < partition.size(); ++k) {
    if (partition[k] >= grid_size) throw std::out_of_range("partition index beyond the grid");
    if (k > 0 && partition[k] <= partition[k - 1]) {
      throw std::invalid_argument("partition indices must increase");
    }
  }
}

double partition_mesh(const TimeGrid& grid, std::span<const std::size_t> partition) {
  double mesh = 0.0;
  for (std::size_t k = 1; k < partition.size(); ++k) {
    mesh = std::max(mesh, grid[partition[k]] - grid[partition[k - 1]]);
  }
  return mesh;
}

IntegralReport sum_terms(std::vector<Tensor1> terms, std::size_t codim, double mesh) {
  IntegralReport report{Tensor1(codim), mesh, std::move(terms)};
  for (const Tensor1& term : report.terms) report.value += term;
  return report;
}

}  // namespace

double fd_check(const FunctionC4& f, std::span<const Tensor1> points) {
  double worst = 0.0;
  const std::size_t d = f.dim();
  for (const Tensor1& x : points) {
    const Jet exact = f.jet(x, kMaxDerivativeOrder);
    const double h = 1e-5 * (1.0 + frobenius_norm(x));
    for (int k = 1; k <= kMaxDerivativeOrder; ++k) {
      const Multilinear& dk = exact.d(k);
      double err = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        Tensor1 plus = x;
        Tensor1 minus = x;
        plus[j] += h;
        minus[j] -= h;
        const Jet jp = f.jet(plus, k - 1);
        const Jet jm = f.jet(minus, k - 1);
        const double step = plus[j] - minus[j];
        // The new argument is the last index: entry (c, i_1..i_{k-1}, j).
        const std::size_t lower_block = dk.block() / d;
        for (std::size_t c = 0; c < f.codim(); ++c) {
          for (std::size_t flat = 0; flat < lower_block; ++flat) {
            const double hi = k == 1 ? jp.value[c] : jp.d(k - 1).at(c, flat);
            const double lo = k == 1 ? jm.value[c] : jm.d(k - 1).at(c, flat);
            const double fd = (hi - lo) / step;
            err = std::max(err, std::abs(fd - dk.at(c, flat * d + j)));
          }
        }
      }
      worst = std::max(worst, err / std::max(1.0, max_abs(dk.entries())));
    }
  }
  return worst;
}

Tensor1 compensated_term(const Jet& jet, const ReducedRoughPath& r, std::size_t i, std::size_t j) {
  if (!(i < j) || j >= r.grid().size()) {
    throw std::invalid_argument("compensated_term: indices must satisfy i < j < n");
  }
  Tensor1 out = jet.d(1).apply(r.x(i, j));
  out += jet.d(2).apply(r.level2(i, j));
  out += jet.d(3).apply(r.level3(i, j));
  return out;
}

Tensor1 compensated_term(const FunctionC4& f, const ReducedRoughPath& r, std::size_t i,
                         std::size_t j) {
  if (!(i < j) || j >= r.grid().size()) {
    throw std::invalid_argument("compensated_term: indices must satisfy i < j < n");
  }
  return compensated_term(f.jet(r.path()[i], 3), r, i, j);
}

std::vector<SplitTriple> nested_midpoint_triples(const TimeGrid& grid, std::size_t start,
                                                 std::size_t span, int count) {
  std::vector<SplitTriple> triples;
  for (int k = 0; k < count; ++k) {
    if (span < 2 || span % 2 != 0 || start + span >= grid.size()) {
      throw std::invalid_argument("nested_midpoint_triples: grid too coarse for " +
                                  std::to_string(count) + " halvings");
    }
    triples.push_back({start, start + span / 2, start + span});
    span /= 2;
  }
  return triples;
}

SewingProbe sewing_defect_probe(const FunctionC4& f, const ReducedRoughPath& r,
                                std::span<const SplitTriple> triples) {
  if (triples.size() < 3) throw std::invalid_argument("sewing_defect_probe needs at least 3 triples");
  SewingProbe probe;
  std::vector<double> log_span;
  std::vector<double> log_defect;
  for (const SplitTriple& tr : triples) {
    if (!(tr.s < tr.u && tr.u < tr.t)) {
      throw std::invalid_argument("sewing_defect_probe: triples need s < u < t");
    }
    const Tensor1 a_st = compensated_term(f, r, tr.s, tr.t);
    const Tensor1 a_su = compensated_term(f, r, tr.s, tr.u);
    const Tensor1 a_ut = compensated_term(f, r, tr.u, tr.t);
    const double defect = frobenius_norm(a_st - a_su - a_ut);
    const double span = r.grid()[tr.t] - r.grid()[tr.s];
    probe.spans.push_back(span);
    probe.defects.push_back(defect);
    const double scale = std::max(
        {1.0, frobenius_norm(a_st), frobenius_norm(a_su), frobenius_norm(a_ut)});
    if (defect >= noise_floor(scale)) {
      log_span.push_back(std::log(span));
      log_defect.push_back(std::log(defect));
    }
  }
  if (log_span.size() >= 2) probe.exponent = least_squares_slope(log_span, log_defect);
  return probe;
}

IntegralReport rough_integral(const FunctionC4& f, const ReducedRoughPath& r,
                              std::span<const std::size_t> partition) {
  check_partition(partition, r.grid().size());
  std::vector<Tensor1> terms;
  terms.reserve(partition.size() - 1);
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
    terms.push_back(compensated_term(f, r, partition[k], partition[k + 1]));
  }
  return sum_terms(std::move(terms), f.codim(), partition_mesh(r.grid(), partition));
}

IntegralReport rough_integral(const FunctionC4& f, const ReducedRoughPath& r, int level) {
  const std::vector<std::size_t> partition = dyadic_partition(r.grid(), level);
  return rough_integral(f, r, partition);
}

FormPath sample_derivative(const FunctionC4& f, const SampledPath& path, int order) {
  if (order < 1 || order > kMaxDerivativeOrder) {
    throw std::invalid_argument("sample_derivative: order must be in [1, 4]");
  }
  FormPath out{path.grid(), {}};
  out.forms.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i) out.forms.push_back(f.jet(path[i], order).d(order));
  return out;
}

IntegralReport young_integral(const FormPath& g, const BracketPath& b,
                              std::span<const std::size_t> partition) {
  if (!(g.grid == b.grid())) throw std::invalid_argument("young_integral: grid mismatch");
  check_partition(partition, g.grid.size());
  const int order = g.order();
  if (order != 2 && order != 3) throw std::invalid_argument("young_integral: order must be 2 or 3");
  std::vector<Tensor1> terms;
  terms.reserve(partition.size() - 1);
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
    const std::size_t i = partition[k];
    const std::size_t j = partition[k + 1];
    terms.push_back(order == 2 ? g.forms[i].apply(b.bracket2(i, j))
                               : g.forms[i].apply(b.bracket3(i, j)));
  }
  return sum_terms(std::move(terms), g.forms.front().codim(), partition_mesh(g.grid, partition));
}

IntegralReport young_integral(const FormPath& g, const BracketPath& b, int level) {
  const std::vector<std::size_t> partition = dyadic_partition(g.grid, level);
  return young_integral(g, b, partition);
}

ItoBreakdown ito_breakdown(const FunctionC4& f, const ReducedRoughPath& r, int level) {
  const std::vector<std::size_t> partition = dyadic_partition(r.grid(), level);
  const BracketPath b = brackets(r);

  // One jet per partition node feeds all three sums.
  std::vector<Tensor1> rough_terms;
  Tensor1 young2(f.codim());
  Tensor1 young3(f.codim());
  for (std::size_t k = 0; k + 1 < partition.size(); ++k) {
    const std::size_t i = partition[k];
    const std::size_t j = partition[k + 1];
    const Jet jet = f.jet(r.path()[i], 3);
    rough_terms.push_back(compensated_term(jet, r, i, j));
    young2 += jet.d(2).apply(b.bracket2(i, j));
    young3 += jet.d(3).apply(b.bracket3(i, j));
  }
  const IntegralReport rough =
      sum_terms(std::move(rough_terms), f.codim(), partition_mesh(r.grid(), partition));

  ItoBreakdown out;
  out.level = level;
  out.mesh = rough.mesh;
  out.lhs = f.value(r.path()[r.grid().size() - 1]) - f.value(r.path()[0]);
  out.rough = rough.value;
  out.young2 = 0.5 * young2;
  out.young3 = (1.0 / 6.0) * young3;
  out.residual = frobenius_norm(out.lhs - out.rough - out.young2 - out.young3);
  out.scale = std::max({1.0, frobenius_norm(out.lhs), frobenius_norm(out.rough),
                        frobenius_norm(out.young2), frobenius_norm(out.young3)});
  return out;
}

double ito_residual(const FunctionC4& f, const ReducedRoughPath& r, int level) {
  return ito_breakdown(f, r, level).residual;
}

double noise_floor(double scale) {
  return 1e3 * std::numeric_limits<double>::epsilon() * scale;
}

ConvergenceStudy convergence_study(const FunctionC4& f, const ReducedRoughPath& r,
                                   int first_level, int last_level) {
  if (!(last_level > first_level && first_level >= 4)) {
    throw std::invalid_argument("convergence_study: need last_level > first_level >= 4");
  }
  ConvergenceStudy study;
  study.rows.resize(static_cast<std::size_t>(last_level - first_level + 1));
  parallel_for(study.rows.size(), [&](std::size_t k) {
    const ItoBreakdown b = ito_breakdown(f, r, first_level + static_cast<int>(k));
    study.rows[k] = {b.level, b.mesh, b.residual, b.scale};
  });

  std::vector<double> log_mesh;
  std::vector<double> log_res;
  for (std::size_t k = 0; k < study.rows.size(); ++k) {
    const ConvergenceRow& row = study.rows[k];
    const bool noise = row.residual < noise_floor(row.scale);
    if (!noise) {
      log_mesh.push_back(std::log(row.mesh));
      log_res.push_back(std::log(row.residual));
    }
    if (k > 0 && !noise && row.residual > study.rows[k - 1].residual) study.monotone = false;
  }
  if (log_mesh.size() >= 2) study.observed_order = least_squares_slope(log_mesh, log_res);
  return study;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("least_squares_slope needs two or more paired points");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: x values are all equal");
  return sxy / sxx;
}

}  // namespace roughcalc
