#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "roughcalc/tensor.hpp"

namespace roughcalc {

// Strictly increasing times 0 = t_0 < ... < t_n = T.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times);

  static TimeGrid dyadic(int levels, double horizon);

  std::size_t size() const { return times_.size(); }
  std::size_t intervals() const { return times_.size() - 1; }
  double horizon() const { return times_.back(); }
  double operator[](std::size_t i) const { return times_[i]; }
  const std::vector<double>& times() const { return times_; }
  double mesh() const;

  // Set only for grids built by dyadic(); the number of halvings of [0, T].
  std::optional<int> dyadic_level() const { return dyadic_level_; }

  // Every stride-th point; requires stride to divide the interval count.
  TimeGrid coarsen(std::size_t stride) const;

  bool operator==(const TimeGrid& other) const { return times_ == other.times_; }

 private:
  std::vector<double> times_;
  std::optional<int> dyadic_level_;
};

TimeGrid make_dyadic_grid(int levels, double horizon);

// Grid indices of the dyadic level-L partition inside a finer dyadic grid.
std::vector<std::size_t> dyadic_partition(const TimeGrid& grid, int level);

template <class Value>
class Path {
 public:
  using value_type = Value;

  Path() = default;
  Path(TimeGrid grid, std::vector<Value> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
      throw std::invalid_argument("path has " + std::to_string(values_.size()) +
                                  " values for a grid of " + std::to_string(grid_.size()) +
                                  " points");
    }
    for (const Value& v : values_) require_same_dim(v.dim(), values_.front().dim(), "path value");
  }

  static Path constant(TimeGrid grid, const Value& value) {
    std::vector<Value> values(grid.size(), value);
    return Path(std::move(grid), std::move(values));
  }

  const TimeGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::size_t dim() const { return values_.front().dim(); }
  const Value& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<Value>& values() const { return values_; }

  // X_{t_i, t_j} = X_{t_j} - X_{t_i}
  Value increment(std::size_t i, std::size_t j) const {
    if (i >= values_.size() || j >= values_.size()) {
      throw std::out_of_range("increment: index out of range");
    }
    return values_[j] - values_[i];
  }

  Path coarsen(std::size_t stride) const {
    TimeGrid coarse = grid_.coarsen(stride);
    std::vector<Value> values;
    values.reserve(coarse.size());
    for (std::size_t i = 0; i < values_.size(); i += stride) values.push_back(values_[i]);
    return Path(std::move(coarse), std::move(values));
  }

  bool operator==(const Path&) const = default;

 private:
  TimeGrid grid_;
  std::vector<Value> values_;
};

using SampledPath = Path<Tensor1>;
using MatrixPath = Path<Tensor2>;
using CubePath = Path<Tensor3>;

enum class GeneratorKind { polynomial, trigonometric, weierstrass, random_walk };

std::string to_string(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

// Parameters per kind:
//   polynomial     c_0, ..., c_q; every coordinate is sum_p c_p t^p
//   trigonometric  amplitude A, frequency f; coordinate k is A sin(2 pi f (k+1) t + k pi / 4)
//   weierstrass    alpha_target, then optionally b (default 2); coordinate k is
//                  sum_{n=0}^{30} a^n cos(b^n pi t + phi_{k,n}), a = b^-alpha_target,
//                  with phi = 0 unless a seed is given, in which case the phases
//                  are seeded uniforms on [0, 2 pi)
//   random_walk    optional sigma (default 1); cumulative sums of seeded
//                  normals scaled by sigma * sqrt(t_{i+1} - t_i)
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::polynomial;
  std::vector<double> params;
  std::optional<std::uint64_t> seed;
};

inline constexpr int kWeierstrassTerms = 31;

SampledPath sample(const GeneratorSpec& spec, const TimeGrid& grid, std::size_t dim);

// Piecewise-linear interpolation of `path` evaluated on `grid`.
SampledPath interpolate_linear(const SampledPath& path, const TimeGrid& grid);

inline constexpr std::size_t kExhaustiveHolderPoints = 4096;

// max_{i<j} |X_j - X_i| / (t_j - t_i)^alpha over all pairs when the grid has
// at most kExhaustiveHolderPoints points, otherwise over pairs with j - i a
// power of two.
template <class Value>
double holder_seminorm(const Path<Value>& path, double alpha);

// CSV with header `t,<prefix>_<i>[_<j>[_<k>]]` (1-based indices), one row per
// grid time, 17 significant digits.
template <class Value>
void write_csv(std::ostream& out, const Path<Value>& path, const std::string& prefix = "x");

template <class Value>
Path<Value> read_csv(std::istream& in);

std::string format_double(double value);

}  // namespace roughcalc
