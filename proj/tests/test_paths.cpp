#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "roughcalc/paths.hpp"

using namespace roughcalc;

namespace {

SampledPath identity_path(const TimeGrid& grid) {
  return sample({GeneratorKind::polynomial, {0.0, 1.0}, std::nullopt}, grid, 1);
}

GeneratorSpec walk(std::uint64_t seed) { return {GeneratorKind::random_walk, {}, seed}; }

}  // namespace

TEST_CASE("dyadic grids") {
  const TimeGrid g1 = make_dyadic_grid(1, 1.0);
  CHECK(g1.times() == std::vector<double>{0.0, 0.5, 1.0});
  const TimeGrid g3 = make_dyadic_grid(3, 1.0);
  CHECK(g3.size() == 9);
  CHECK(g3.mesh() == 0.125);
  CHECK(g3.dyadic_level() == 3);
  CHECK(make_dyadic_grid(2, 2.0).times() == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS(make_dyadic_grid(0, 1.0));
  CHECK_THROWS(make_dyadic_grid(2, -1.0));
}

TEST_CASE("time grids must start at zero and increase strictly") {
  CHECK_THROWS(TimeGrid({0.0, 0.5, 0.5, 1.0}));
  CHECK_THROWS(TimeGrid({0.1, 0.5}));
  CHECK_THROWS(TimeGrid({0.0}));
  const TimeGrid g({0.0, 0.1, 0.5, 1.0});
  CHECK(g.mesh() == 0.5);
  CHECK(g.horizon() == 1.0);
}

TEST_CASE("dyadic_partition picks the coarse points of a finer grid") {
  const TimeGrid g = make_dyadic_grid(4, 1.0);
  const auto idx = dyadic_partition(g, 2);
  CHECK(idx == std::vector<std::size_t>{0, 4, 8, 12, 16});
}

TEST_CASE("sampling X_t = t returns the grid times") {
  const TimeGrid g = make_dyadic_grid(4, 2.0);
  const SampledPath x = identity_path(g);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(x[i][0] == g[i]);
}

TEST_CASE("deterministic kinds restrict to coarser grids pointwise") {
  const TimeGrid fine = make_dyadic_grid(6, 1.0);
  const TimeGrid coarse = make_dyadic_grid(3, 1.0);
  const std::vector<GeneratorSpec> specs = {
      {GeneratorKind::polynomial, {0.1, -1.0, 2.0}, std::nullopt},
      {GeneratorKind::trigonometric, {1.5, 2.0}, std::nullopt},
      {GeneratorKind::weierstrass, {0.4}, std::nullopt},
      {GeneratorKind::weierstrass, {0.4, 3.0}, 5},
  };
  for (const auto& spec : specs) {
    CHECK(sample(spec, fine, 3).coarsen(8) == sample(spec, coarse, 3));
  }
}

TEST_CASE("random walks are reproducible from their seed") {
  const TimeGrid g = make_dyadic_grid(8, 1.0);
  const SampledPath a = sample(walk(42), g, 3);
  CHECK(a == sample(walk(42), g, 3));
  CHECK_FALSE(a == sample(walk(43), g, 3));
  CHECK(sample({GeneratorKind::random_walk, {}, std::nullopt}, g, 3) == sample(walk(0), g, 3));
  CHECK(frobenius_norm(a[0]) == 0.0);
}

TEST_CASE("random-walk increments have variance close to the step") {
  const TimeGrid g = make_dyadic_grid(14, 1.0);
  const SampledPath x = sample(walk(9), g, 1);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) sum_sq += std::pow(x.increment(i, i + 1)[0], 2);
  // Quadratic variation over [0, 1] has mean 1 and standard deviation sqrt(2 / n).
  CHECK(std::abs(sum_sq - 1.0) < 5.0 * std::sqrt(2.0 / 16384.0));
}

TEST_CASE("invalid generator parameters are rejected") {
  const TimeGrid g = make_dyadic_grid(2, 1.0);
  CHECK_THROWS(sample({GeneratorKind::weierstrass, {0.5, 1.0}, std::nullopt}, g, 1));
  CHECK_THROWS(sample({GeneratorKind::weierstrass, {1.5}, std::nullopt}, g, 1));
  CHECK_THROWS(sample({GeneratorKind::polynomial, {}, std::nullopt}, g, 1));
  CHECK_THROWS(sample({GeneratorKind::random_walk, {-1.0}, 1}, g, 1));
  CHECK_THROWS(parse_generator_kind("brownian"));
}

TEST_CASE("increments") {
  const TimeGrid g = make_dyadic_grid(5, 3.0);
  const SampledPath x = sample(walk(4), g, 2);
  CHECK(frobenius_norm(x.increment(7, 7)) == 0.0);
  CHECK(identity_path(g).increment(0, g.size() - 1)[0] == 3.0);
  CHECK(x.increment(3, 11) == -x.increment(11, 3));
  CHECK_THROWS_AS(x.increment(0, g.size()), std::out_of_range);
}

TEST_CASE("increments are additive exactly on dyadic-rational values") {
  const TimeGrid g = make_dyadic_grid(6, 1.0);
  const SampledPath x = sample({GeneratorKind::polynomial, {0.0, 1.0, 1.0}, std::nullopt}, g, 2);
  for (std::size_t i = 0; i < g.size(); i += 7) {
    for (std::size_t j = i; j < g.size(); j += 5) {
      for (std::size_t k = j; k < g.size(); k += 3) {
        CHECK(x.increment(i, k) == x.increment(i, j) + x.increment(j, k));
      }
    }
  }
}

TEST_CASE("Hoelder seminorm examples") {
  const TimeGrid g = make_dyadic_grid(6, 1.0);
  CHECK(holder_seminorm(SampledPath::constant(g, make_vector({1.0, 2.0})), 0.5) == 0.0);
  CHECK(holder_seminorm(identity_path(g), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(holder_seminorm(identity_path(g), 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(holder_seminorm(identity_path(g), 0.0));
}

TEST_CASE("Hoelder seminorm matches a brute-force maximum") {
  const TimeGrid g = make_dyadic_grid(7, 1.0);
  const SampledPath x = sample(walk(12), g, 2);
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dist = oracle::norm(oracle::add(oracle::flat(x[j]), oracle::flat(x[i]), -1.0));
      best = std::max(best, dist / std::pow(g[j] - g[i], 0.4));
    }
  }
  CHECK(holder_seminorm(x, 0.4) == doctest::Approx(best).epsilon(1e-14));
}

TEST_CASE("Hoelder seminorm does not increase under coarsening") {
  const TimeGrid g = make_dyadic_grid(9, 1.0);
  const SampledPath x = sample(walk(77), g, 3);
  double previous = holder_seminorm(x, 0.45);
  for (std::size_t stride = 2; stride <= 64; stride *= 2) {
    const double coarse = holder_seminorm(x.coarsen(stride), 0.45);
    CHECK(coarse <= previous);
    previous = coarse;
  }
}

TEST_CASE("Weierstrass paths have the target regularity") {
  const double alpha = 0.4;
  const GeneratorSpec spec{GeneratorKind::weierstrass, {alpha}, 3};
  double lo = INFINITY;
  double hi = 0.0;
  for (int level = 6; level <= 12; ++level) {
    const double s = holder_seminorm(sample(spec, make_dyadic_grid(level, 1.0), 1), alpha);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  CHECK(hi <= 4.0 * lo);
  const double rough6 = holder_seminorm(sample(spec, make_dyadic_grid(6, 1.0), 1), alpha + 0.1);
  const double rough12 = holder_seminorm(sample(spec, make_dyadic_grid(12, 1.0), 1), alpha + 0.1);
  // Six halvings at an excess exponent of 0.1 give 2^0.6 for the exact
  // supremum; the discrete estimator reaches about that.
  CHECK(rough12 >= 1.5 * rough6);
}

TEST_CASE("paths round-trip through CSV") {
  const TimeGrid g = make_dyadic_grid(5, 1.7);
  const SampledPath x = sample({GeneratorKind::weierstrass, {0.3}, 8}, g, 3);
  std::stringstream buffer;
  write_csv(buffer, x);
  std::string header;
  std::getline(std::istringstream(buffer.str()) >> std::ws, header);
  CHECK(header == "t,x_1,x_2,x_3");
  CHECK(read_csv<Tensor1>(buffer) == x);

  const MatrixPath m = MatrixPath::constant(g, Tensor2(2, {1.0 / 3.0, 0.1, 0.1, -2e-300}));
  std::stringstream mbuf;
  write_csv(mbuf, m, "gamma");
  CHECK(mbuf.str().rfind("t,gamma_1_1,gamma_1_2,gamma_2_1,gamma_2_2\n", 0) == 0);
  CHECK(read_csv<Tensor2>(mbuf) == m);
}

TEST_CASE("malformed CSV is rejected") {
  std::istringstream no_header("");
  CHECK_THROWS(read_csv<Tensor1>(no_header));
  std::istringstream bad_cell("t,x_1\n0,1\n0.5,abc\n");
  CHECK_THROWS(read_csv<Tensor1>(bad_cell));
  std::istringstream short_row("t,x_1,x_2\n0,1\n");
  CHECK_THROWS(read_csv<Tensor1>(short_row));
}

TEST_CASE("linear interpolation reproduces linear paths") {
  const TimeGrid coarse = make_dyadic_grid(3, 1.0);
  const TimeGrid fine = make_dyadic_grid(6, 1.0);
  const SampledPath lin = sample({GeneratorKind::polynomial, {1.0, 2.0}, std::nullopt}, coarse, 2);
  const SampledPath up = interpolate_linear(lin, fine);
  for (std::size_t i = 0; i < fine.size(); ++i) {
    CHECK(up[i][1] == doctest::Approx(1.0 + 2.0 * fine[i]).epsilon(1e-15));
  }
}
