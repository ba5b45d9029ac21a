#include "roughcalc/paths.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "roughcalc/random.hpp"

namespace roughcalc {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2) throw std::invalid_argument("time grid needs at least two points");
  if (times_.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) {
      throw std::invalid_argument("time grid must be strictly increasing (index " +
                                  std::to_string(i) + ")");
    }
  }
}

TimeGrid TimeGrid::dyadic(int levels, double horizon) {
  if (levels < 1 || levels > 30) throw std::invalid_argument("dyadic level must be in [1, 30]");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("horizon must be positive");
  }
  const std::size_t n = std::size_t{1} << levels;
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    times[i] = horizon * (static_cast<double>(i) / static_cast<double>(n));
  }
  TimeGrid grid(std::move(times));
  grid.dyadic_level_ = levels;
  return grid;
}

double TimeGrid::mesh() const {
  double mesh = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) mesh = std::max(mesh, times_[i] - times_[i - 1]);
  return mesh;
}

TimeGrid TimeGrid::coarsen(std::size_t stride) const {
  if (stride == 0 || intervals() % stride != 0) {
    throw std::invalid_argument("coarsen: stride must divide the interval count");
  }
  std::vector<double> times;
  times.reserve(intervals() / stride + 1);
  for (std::size_t i = 0; i < times_.size(); i += stride) times.push_back(times_[i]);
  TimeGrid out(std::move(times));
  if (dyadic_level_ && std::has_single_bit(stride)) {
    out.dyadic_level_ = *dyadic_level_ - std::countr_zero(stride);
  }
  return out;
}

TimeGrid make_dyadic_grid(int levels, double horizon) { return TimeGrid::dyadic(levels, horizon); }

std::vector<std::size_t> dyadic_partition(const TimeGrid& grid, int level) {
  const auto fine = grid.dyadic_level();
  if (!fine) throw std::invalid_argument("dyadic_partition: grid is not dyadic");
  if (level < 0 || level > *fine) {
    throw std::invalid_argument("dyadic_partition: level " + std::to_string(level) +
                                " exceeds the grid level " + std::to_string(*fine));
  }
  const std::size_t stride = std::size_t{1} << (*fine - level);
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < grid.size(); i += stride) indices.push_back(i);
  return indices;
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::polynomial: return "polynomial";
    case GeneratorKind::trigonometric: return "trigonometric";
    case GeneratorKind::weierstrass: return "weierstrass";
    case GeneratorKind::random_walk: return "random-walk";
  }
  return "unknown";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "polynomial") return GeneratorKind::polynomial;
  if (name == "trigonometric") return GeneratorKind::trigonometric;
  if (name == "weierstrass") return GeneratorKind::weierstrass;
  if (name == "random-walk") return GeneratorKind::random_walk;
  throw std::invalid_argument("unknown path kind '" + name + "'");
}

namespace {

std::vector<Tensor1> polynomial_values(const std::vector<double>& coeffs, const TimeGrid& grid,
                                       std::size_t dim) {
  if (coeffs.empty()) throw std::invalid_argument("polynomial path needs coefficients");
  std::vector<Tensor1> values;
  values.reserve(grid.size());
  for (double t : grid.times()) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
    values.emplace_back(dim, std::vector<double>(dim, acc));
  }
  return values;
}

std::vector<Tensor1> trigonometric_values(const std::vector<double>& params, const TimeGrid& grid,
                                          std::size_t dim) {
  if (params.size() != 2) {
    throw std::invalid_argument("trigonometric path takes (amplitude, frequency)");
  }
  const double amplitude = params[0];
  const double frequency = params[1];
  std::vector<Tensor1> values;
  values.reserve(grid.size());
  for (double t : grid.times()) {
    Tensor1 v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const double kk = static_cast<double>(k);
      v[k] = amplitude * std::sin(2.0 * std::numbers::pi * frequency * (kk + 1.0) * t +
                                  kk * std::numbers::pi / 4.0);
    }
    values.push_back(std::move(v));
  }
  return values;
}

std::vector<Tensor1> weierstrass_values(const std::vector<double>& params,
                                        std::optional<std::uint64_t> seed, const TimeGrid& grid,
                                        std::size_t dim) {
  if (params.empty() || params.size() > 2) {
    throw std::invalid_argument("weierstrass path takes (alpha_target[, b])");
  }
  const double alpha = params[0];
  const double b = params.size() == 2 ? params[1] : 2.0;
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("weierstrass alpha_target must lie in (0, 1]");
  }
  if (!(b > 1.0)) throw std::invalid_argument("weierstrass base b must exceed 1");
  const double a = std::pow(b, -alpha);

  std::vector<double> phase(dim * kWeierstrassTerms, 0.0);
  if (seed) {
    const CounterRng rng(*seed, /*stream=*/0x5745);
    for (std::size_t i = 0; i < phase.size(); ++i) {
      phase[i] = 2.0 * std::numbers::pi * rng.uniform(i);
    }
  }

  std::vector<Tensor1> values;
  values.reserve(grid.size());
  for (double t : grid.times()) {
    Tensor1 v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      double amp = 1.0;
      double freq = std::numbers::pi;
      double sum = 0.0;
      for (int n = 0; n < kWeierstrassTerms; ++n) {
        sum += amp * std::cos(freq * t + phase[k * kWeierstrassTerms + n]);
        amp *= a;
        freq *= b;
      }
      v[k] = sum;
    }
    values.push_back(std::move(v));
  }
  return values;
}

std::vector<Tensor1> random_walk_values(const std::vector<double>& params,
                                        std::optional<std::uint64_t> seed, const TimeGrid& grid,
                                        std::size_t dim) {
  if (params.size() > 1) throw std::invalid_argument("random-walk path takes (sigma)");
  const double sigma = params.empty() ? 1.0 : params[0];
  if (!(sigma >= 0.0)) throw std::invalid_argument("random-walk sigma must be nonnegative");
  const CounterRng rng(seed.value_or(0), /*stream=*/0x5257);
  std::vector<Tensor1> values;
  values.reserve(grid.size());
  Tensor1 current(dim);
  values.push_back(current);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double scale = sigma * std::sqrt(grid[i + 1] - grid[i]);
    for (std::size_t k = 0; k < dim; ++k) current[k] += scale * rng.normal(i * dim + k);
    values.push_back(current);
  }
  return values;
}

}  // namespace

SampledPath sample(const GeneratorSpec& spec, const TimeGrid& grid, std::size_t dim) {
  if (dim == 0) throw DimensionError("path dimension must be positive");
  std::vector<Tensor1> values;
  switch (spec.kind) {
    case GeneratorKind::polynomial: values = polynomial_values(spec.params, grid, dim); break;
    case GeneratorKind::trigonometric: values = trigonometric_values(spec.params, grid, dim); break;
    case GeneratorKind::weierstrass:
      values = weierstrass_values(spec.params, spec.seed, grid, dim);
      break;
    case GeneratorKind::random_walk:
      values = random_walk_values(spec.params, spec.seed, grid, dim);
      break;
  }
  return SampledPath(grid, std::move(values));
}

SampledPath interpolate_linear(const SampledPath& path, const TimeGrid& grid) {
  const TimeGrid& knots = path.grid();
  if (std::abs(grid.horizon() - knots.horizon()) > 1e-12 * knots.horizon()) {
    throw std::invalid_argument("interpolate_linear: horizons differ");
  }
  std::vector<Tensor1> values;
  values.reserve(grid.size());
  std::size_t seg = 0;
  for (double t : grid.times()) {
    while (seg + 2 < knots.size() && knots[seg + 1] <= t) ++seg;
    const double w = std::clamp((t - knots[seg]) / (knots[seg + 1] - knots[seg]), 0.0, 1.0);
    Tensor1 v = path[seg];
    if (w == 1.0) {
      v = path[seg + 1];
    } else if (w != 0.0) {
      v.add_scaled(w, path[seg + 1] - path[seg]);
    }
    values.push_back(std::move(v));
  }
  return SampledPath(grid, std::move(values));
}

template <class Value>
double holder_seminorm(const Path<Value>& path, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");
  const TimeGrid& grid = path.grid();
  const std::size_t n = path.size();
  double best = 0.0;
  auto visit = [&](std::size_t i, std::size_t j) {
    const double num = frobenius_norm(path[j] - path[i]);
    best = std::max(best, num / std::pow(grid[j] - grid[i], alpha));
  };
  if (n <= kExhaustiveHolderPoints) {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) visit(i, j);
    }
  } else {
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t span = 1; i + span < n; span *= 2) visit(i, i + span);
    }
  }
  return best;
}

template double holder_seminorm<Tensor1>(const Path<Tensor1>&, double);
template double holder_seminorm<Tensor2>(const Path<Tensor2>&, double);
template double holder_seminorm<Tensor3>(const Path<Tensor3>&, double);

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

template <int D>
void append_index_names(std::string& header, const std::string& prefix, std::size_t dim) {
  const std::size_t total = Tensor<D>::flat_size(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t idx[3] = {0, 0, 0};
    std::size_t rest = flat;
    for (int k = D - 1; k >= 0; --k) {
      idx[k] = rest % dim;
      rest /= dim;
    }
    header += ',';
    header += prefix;
    for (int k = 0; k < D; ++k) header += '_' + std::to_string(idx[k] + 1);
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != cell.size()) {
    throw std::invalid_argument("csv row " + std::to_string(row) + ": not a number: '" + cell + "'");
  }
  return value;
}

}  // namespace

template <class Value>
void write_csv(std::ostream& out, const Path<Value>& path, const std::string& prefix) {
  std::string header = "t";
  append_index_names<Value::degree>(header, prefix, path.dim());
  out << header << '\n';
  for (std::size_t i = 0; i < path.size(); ++i) {
    std::string row = format_double(path.grid()[i]);
    for (double e : path[i].entries()) {
      row += ',';
      row += format_double(e);
    }
    out << row << '\n';
  }
}

template <class Value>
Path<Value> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: missing header");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.size() < 2 || header.front() != "t") {
    throw std::invalid_argument("csv: header must start with 't'");
  }
  const std::size_t width = header.size() - 1;
  std::size_t dim = 1;
  while (Value::flat_size(dim) < width) ++dim;
  if (Value::flat_size(dim) != width) {
    throw std::invalid_argument("csv: " + std::to_string(width) +
                                " value columns is not a tensor size of degree " +
                                std::to_string(Value::degree));
  }
  std::vector<double> times;
  std::vector<Value> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("csv row " + std::to_string(row) + ": expected " +
                                  std::to_string(header.size()) + " cells");
    }
    times.push_back(parse_cell(cells[0], row));
    std::vector<double> entries(width);
    for (std::size_t c = 0; c < width; ++c) entries[c] = parse_cell(cells[c + 1], row);
    values.emplace_back(dim, std::move(entries));
  }
  return Path<Value>(TimeGrid(std::move(times)), std::move(values));
}

template void write_csv<Tensor1>(std::ostream&, const Path<Tensor1>&, const std::string&);
template void write_csv<Tensor2>(std::ostream&, const Path<Tensor2>&, const std::string&);
template void write_csv<Tensor3>(std::ostream&, const Path<Tensor3>&, const std::string&);
template Path<Tensor1> read_csv<Tensor1>(std::istream&);
template Path<Tensor2> read_csv<Tensor2>(std::istream&);
template Path<Tensor3> read_csv<Tensor3>(std::istream&);

}  // namespace roughcalc
