#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "roughcalc/calculus.hpp"

using namespace roughcalc;

namespace {

SampledPath identity_path(const TimeGrid& grid) {
  return sample({GeneratorKind::polynomial, {0.0, 1.0}, std::nullopt}, grid, 1);
}

SampledPath walk_path(int level, std::size_t d, std::uint64_t seed) {
  return sample({GeneratorKind::random_walk, {}, seed}, make_dyadic_grid(level, 1.0), d);
}

FunctionC4 square() { return FunctionC4::ridge_polynomial(1, 1, {0.0, 0.0, 1.0}); }
FunctionC4 quartic() { return FunctionC4::ridge_polynomial(1, 1, {0.0, 0.0, 0.0, 0.0, 1.0}); }

ReducedRoughPath ito_enhancement(const SampledPath& x) {
  return perturb(canonical_reduced(x), linear_gamma(x.grid(), Tensor2(1, {-1.0})),
                 zero_eta(x.grid(), 1));
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t last) {
  std::vector<std::size_t> out;
  for (std::size_t i = first; i <= last; ++i) out.push_back(i);
  return out;
}

bool close(const Tensor1& a, const Tensor1& b, double tol = 1e-12) { return approx_equal(a, b, tol); }

}  // namespace

TEST_CASE("compensated terms") {
  const TimeGrid g = make_dyadic_grid(4, 1.0);
  SUBCASE("linear F sees only the increment") {
    const std::vector<double> c = {2.0, -1.0, 0.5};
    const FunctionC4 f = FunctionC4::linear(3, 1, c);
    const ReducedRoughPath r = perturb(canonical_reduced(walk_path(4, 3, 1)),
                                       lipschitz_gamma(g, 3, 1.0, 2), lipschitz_eta(g, 3, 1.0, 3));
    const Tensor1 inc = r.x(2, 9);
    const double expected = 2.0 * inc[0] - inc[1] + 0.5 * inc[2];
    CHECK(compensated_term(f, r, 2, 9)[0] == doctest::Approx(expected).epsilon(1e-14));
  }
  SUBCASE("x squared along X_t = t") {
    const ReducedRoughPath r = canonical_reduced(identity_path(g));
    for (std::size_t i = 0; i < g.size(); i += 3) {
      for (std::size_t j = i + 1; j < g.size(); j += 2) {
        const double s = g[i], t = g[j];
        CHECK(compensated_term(square(), r, i, j)[0] ==
              doctest::Approx(2 * s * (t - s) + (t - s) * (t - s)).epsilon(1e-14));
      }
    }
  }
  SUBCASE("constant path gives zero") {
    const ReducedRoughPath r = canonical_reduced(SampledPath::constant(g, make_vector({0.4})));
    CHECK(compensated_term(quartic(), r, 0, 16)[0] == 0.0);
  }
  SUBCASE("third-order weights are all one") {
    // For F = x^3 in one dimension the term is 3x^2 X + 6x H + 6 h.
    const FunctionC4 cube = FunctionC4::ridge_polynomial(1, 1, {0.0, 0.0, 0.0, 1.0});
    const SampledPath x = walk_path(4, 1, 4);
    const ReducedRoughPath r = perturb(canonical_reduced(x), lipschitz_gamma(g, 1, 1.0, 5),
                                       lipschitz_eta(g, 1, 1.0, 6));
    const double x0 = x[3][0];
    const double expected = 3 * x0 * x0 * r.x(3, 10)[0] + 6 * x0 * r.level2(3, 10)[0] +
                            6 * r.level3(3, 10)[0];
    CHECK(compensated_term(cube, r, 3, 10)[0] == doctest::Approx(expected).epsilon(1e-13));
  }
  SUBCASE("indices must be ordered") {
    const ReducedRoughPath r = canonical_reduced(identity_path(g));
    CHECK_THROWS(compensated_term(square(), r, 5, 2));
  }
}

TEST_CASE("rough integrals") {
  SUBCASE("linear F telescopes at every level") {
    const std::vector<double> c = {1.0, 3.0, -2.0, 0.5};
    const FunctionC4 f = FunctionC4::linear(2, 2, c);
    const SampledPath x = walk_path(8, 2, 7);
    const ReducedRoughPath r = canonical_reduced(x);
    const Tensor1 inc = x.increment(0, x.size() - 1);
    const Tensor1 expected = make_vector({inc[0] + 3.0 * inc[1], -2.0 * inc[0] + 0.5 * inc[1]});
    for (int level = 1; level <= 8; ++level) CHECK(close(rough_integral(f, r, level).value, expected));
  }
  SUBCASE("x squared along X_t = t converges to T^2") {
    const ReducedRoughPath r = canonical_reduced(identity_path(make_dyadic_grid(12, 1.0)));
    const IntegralReport rep = rough_integral(square(), r, 12);
    CHECK(std::abs(rep.value[0] - 1.0) <= 1e-6);
    CHECK(rep.mesh == 0x1p-12);
    Tensor1 total(1);
    for (const Tensor1& term : rep.terms) total += term;
    CHECK(total == rep.value);
  }
  SUBCASE("the Ito enhancement of X_t = t converges to T^2 - T") {
    const ReducedRoughPath r = ito_enhancement(identity_path(make_dyadic_grid(12, 1.0)));
    CHECK(std::abs(rough_integral(square(), r, 12).value[0]) <= 1e-6);
  }
}

TEST_CASE("Young integrals") {
  const TimeGrid g = make_dyadic_grid(10, 1.0);
  const SampledPath x = identity_path(g);
  const BracketPath b = brackets(ito_enhancement(x));
  SUBCASE("constant form against b2_t = t") {
    const FunctionC4 half_square = FunctionC4::ridge_polynomial(1, 1, {0.0, 0.0, 0.5});
    for (int level = 1; level <= 10; ++level) {
      CHECK(young_integral(sample_derivative(half_square, x, 2), b, level).value[0] ==
            doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("second derivative of x^2") {
    CHECK(young_integral(sample_derivative(square(), x, 2), b, 10).value[0] ==
          doctest::Approx(2.0).epsilon(1e-14));
  }
  SUBCASE("second derivative of x^3 converges to 3T^2 at first order") {
    const FunctionC4 cube = FunctionC4::ridge_polynomial(1, 1, {0.0, 0.0, 0.0, 1.0});
    for (int level = 4; level <= 10; ++level) {
      const IntegralReport rep = young_integral(sample_derivative(cube, x, 2), b, level);
      // Left-point sum of 6 t dt falls short by exactly 3 T mesh.
      CHECK(std::abs(rep.value[0] - 3.0) <= 3.0 * rep.mesh + 1e-12);
      CHECK(rep.value[0] == doctest::Approx(3.0 - 3.0 * rep.mesh).epsilon(1e-12));
    }
  }
  SUBCASE("grid mismatch is rejected") {
    const SampledPath other = identity_path(make_dyadic_grid(9, 1.0));
    CHECK_THROWS(young_integral(sample_derivative(square(), other, 2), b, 5));
  }
}

TEST_CASE("Ito residuals") {
  SUBCASE("linear F has zero residual for any reduced path") {
    const std::vector<double> c = {1.0, -1.0};
    const TimeGrid g = make_dyadic_grid(8, 1.0);
    const ReducedRoughPath r = perturb(canonical_reduced(walk_path(8, 2, 3)),
                                       lipschitz_gamma(g, 2, 1.0, 4), lipschitz_eta(g, 2, 1.0, 5));
    for (int level = 1; level <= 8; ++level) {
      CHECK(ito_residual(FunctionC4::linear(2, 1, c), r, level) <= 1e-14);
    }
  }
  SUBCASE("x squared along the Ito enhancement of X_t = t") {
    const ReducedRoughPath r = ito_enhancement(identity_path(make_dyadic_grid(12, 1.0)));
    const ItoBreakdown b = ito_breakdown(square(), r, 12);
    CHECK(b.lhs[0] == 1.0);
    CHECK(std::abs(b.rough[0]) <= 1e-12);
    CHECK(b.young2[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.young3[0] == 0.0);
    CHECK(b.residual <= 1e-12);
  }
  SUBCASE("x squared along a random walk with the Ito bracket") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ReducedRoughPath r = ito_enhancement(walk_path(14, 1, seed));
      const ConvergenceStudy study = convergence_study(square(), r, 8, 14);
      CHECK(study.monotone);
      const ItoBreakdown b = ito_breakdown(square(), r, 14);
      CHECK(study.rows.back().residual <= 1e-3 * frobenius_norm(b.lhs) + 1e-9);
    }
  }
}

TEST_CASE("integral identities") {
  const TimeGrid g = make_dyadic_grid(9, 1.0);
  const SampledPath x = walk_path(9, 2, 61);
  const ReducedRoughPath canonical = canonical_reduced(x);
  const MatrixPath gamma = lipschitz_gamma(g, 2, 1.0, 62);
  const CubePath eta = lipschitz_eta(g, 2, 1.0, 63);
  const ReducedRoughPath r = perturb(canonical, gamma, eta);

  SUBCASE("linearity in F") {
    const std::vector<double> c1 = {0.5, -1.0, 2.0, 0.3};
    const std::vector<double> c2 = {1.0, 0.0, -0.5, 0.0, 1.5};
    std::vector<double> mix(5, 0.0);
    for (std::size_t k = 0; k < 5; ++k) mix[k] = 2.0 * (k < 4 ? c1[k] : 0.0) - 3.0 * c2[k];
    const FunctionC4 f = FunctionC4::ridge_polynomial(2, 1, c1);
    const FunctionC4 h = FunctionC4::ridge_polynomial(2, 1, c2);
    const FunctionC4 combo = FunctionC4::ridge_polynomial(2, 1, mix);
    for (int level = 3; level <= 9; level += 3) {
      const Tensor1 expected =
          2.0 * rough_integral(f, r, level).value - 3.0 * rough_integral(h, r, level).value;
      CHECK(close(rough_integral(combo, r, level).value, expected));
    }
  }
  SUBCASE("additivity over time") {
    const FunctionC4 f = FunctionC4::trig_exp(2, 2, 64);
    const std::size_t n = g.intervals();
    const Tensor1 whole = rough_integral(f, r, index_range(0, n)).value;
    const Tensor1 halves = rough_integral(f, r, index_range(0, n / 2)).value +
                           rough_integral(f, r, index_range(n / 2, n)).value;
    CHECK(close(whole, halves));
  }
  SUBCASE("perturbing shifts the integral by the bracket Young integrals") {
    const FunctionC4 f = FunctionC4::composite(2, 2, 65);
    const BracketPath b = brackets(r);
    for (int level = 2; level <= 9; ++level) {
      const Tensor1 expected = rough_integral(f, canonical, level).value -
                               0.5 * young_integral(sample_derivative(f, x, 2), b, level).value -
                               (1.0 / 6.0) * young_integral(sample_derivative(f, x, 3), b, level).value;
      CHECK(close(rough_integral(f, r, level).value, expected));
    }
  }
}

TEST_CASE("sewing defect probe") {
  const TimeGrid g = make_dyadic_grid(10, 1.0);
  const SampledPath smooth = sample({GeneratorKind::polynomial, {0.1, 1.0, -0.5, 0.75}, std::nullopt}, g, 1);
  const ReducedRoughPath r = canonical_reduced(smooth);
  const auto triples = nested_midpoint_triples(g, 0, g.intervals(), 8);
  REQUIRE(triples.size() == 8);
  CHECK(triples[0].s == 0);
  CHECK(triples[0].u == 512);
  CHECK(triples[0].t == 1024);
  CHECK(triples[7].t == 8);

  SUBCASE("linear F has no defect beyond rounding") {
    const std::vector<double> c = {2.0};
    const SewingProbe p = sewing_defect_probe(FunctionC4::linear(1, 1, c), r, triples);
    for (double v : p.defects) CHECK(v <= noise_floor(2.0));
    CHECK(p.exponent == kConvergedSentinel);
  }
  SUBCASE("quadratic F cancels exactly") {
    const SewingProbe p = sewing_defect_probe(square(), r, triples);
    for (double v : p.defects) CHECK(v <= 1e-14);
  }
  SUBCASE("quartic F along a smooth path") {
    CHECK(sewing_defect_probe(quartic(), r, triples).exponent >= 3.5);
  }
  SUBCASE("too few triples") {
    const std::vector<SplitTriple> two(triples.begin(), triples.begin() + 2);
    CHECK_THROWS(sewing_defect_probe(quartic(), r, two));
  }
}

TEST_CASE("convergence studies") {
  SUBCASE("the chain rule is recovered for piecewise-linear paths") {
    const SampledPath x =
        sample({GeneratorKind::trigonometric, {1.0, 1.0}, std::nullopt}, make_dyadic_grid(12, 1.0), 2);
    const ConvergenceStudy study =
        convergence_study(FunctionC4::random_polynomial(2, 1, 4, 3), canonical_reduced(x), 4, 10);
    CHECK(study.rows.size() == 7);
    CHECK(study.observed_order >= 1.0);
    const BracketPath b = brackets(canonical_reduced(x));
    CHECK(frobenius_norm(b.bracket2(0, x.size() - 1)) == 0.0);
  }
  SUBCASE("linear F reports the sentinel") {
    const std::vector<double> c = {1.0};
    const ConvergenceStudy study = convergence_study(
        FunctionC4::linear(1, 1, c), ito_enhancement(walk_path(10, 1, 2)), 4, 10);
    CHECK(study.observed_order == kConvergedSentinel);
    CHECK(study.monotone);
  }
  SUBCASE("level order is validated") {
    CHECK_THROWS(convergence_study(square(), canonical_reduced(walk_path(6, 1, 2)), 6, 5));
    CHECK_THROWS(convergence_study(square(), canonical_reduced(walk_path(6, 1, 2)), 4, 7));
  }
}

TEST_CASE("quartic F along a rough Weierstrass path extrapolates to the finest level") {
  const int first = 8, last = 14;
  const TimeGrid g = make_dyadic_grid(last, 1.0);
  const SampledPath x = sample({GeneratorKind::weierstrass, {0.3}, 1}, g, 1);
  const ReducedRoughPath r =
      perturb(canonical_reduced(x), lipschitz_gamma(g, 1, 1.0, 11), lipschitz_eta(g, 1, 1.0, 12));
  const ConvergenceStudy study = convergence_study(quartic(), r, first, last);
  std::vector<double> logm, logr;
  for (const ConvergenceRow& row : study.rows) {
    if (row.level == last) continue;
    logm.push_back(std::log(row.mesh));
    logr.push_back(std::log(row.residual));
  }
  const double slope = least_squares_slope(logm, logr);
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t k = 0; k < logm.size(); ++k) {
    mean_x += logm[k] / logm.size();
    mean_y += logr[k] / logr.size();
  }
  const double predicted = std::exp(mean_y + slope * (std::log(study.rows.back().mesh) - mean_x));
  CHECK(study.rows.back().residual <= 10.0 * predicted);
}

TEST_CASE("least-squares slope") {
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y = {1.0, 3.0, 5.0, 7.0};
  CHECK(least_squares_slope(x, y) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(noise_floor(1.0) == doctest::Approx(1e3 * 2.220446049250313e-16));
}
