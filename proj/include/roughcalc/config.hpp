#pragma once

// Experiment configuration: flat `key = value` lines with dotted section keys,
// `#` comments, comma-separated lists. One experiment per file.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "roughcalc/paths.hpp"

namespace roughcalc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PerturbationSpec {
  enum class Kind { none, linear_matrix, lipschitz_seeded };
  Kind kind = Kind::none;
  std::vector<double> coefficients;  // linear-matrix: d^2 (gamma) or d^3 (eta) entries
  double amplitude = 1.0;            // lipschitz-seeded
  std::uint64_t seed = 0;            // lipschitz-seeded

  bool operator==(const PerturbationSpec&) const = default;
};

struct FunctionSpec {
  std::string family = "polynomial";  // polynomial | trig-exp | composite
  std::vector<double> coefficients;   // polynomial: ridge coefficients c_0..c_q
  std::optional<int> degree;          // polynomial: seeded multivariate of this degree
  std::uint64_t seed = 0;

  bool operator==(const FunctionSpec&) const = default;
};

struct ExperimentConfig {
  std::size_t dimension = 1;
  std::size_t codomain = 1;
  double horizon = 1.0;

  GeneratorKind path_kind = GeneratorKind::polynomial;
  std::vector<double> path_coefficients;
  std::optional<std::uint64_t> path_seed;
  // Sample at this dyadic level and interpolate linearly onto the fine grid.
  std::optional<int> path_knots_level;
  double alpha_target = 0.3;

  PerturbationSpec gamma;
  PerturbationSpec eta;
  FunctionSpec function;

  int levels_min = 4;
  int levels_max = 10;

  double validate_tolerance = 1e-12;
  std::size_t validate_max_triples = 10000;
  std::optional<std::size_t> validate_corrupt_interval;
  double validate_corrupt_amount = 1e-6;

  double ito_threshold = 1e-9;

  double converge_min_order = 1.0;
  double converge_min_sewing_exponent = 1.0;
  double converge_relative_tolerance = 1e-3;
  int converge_sewing_halvings = 8;

  bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& file);
std::string serialize_config(const ExperimentConfig& config);

// The path generator spec implied by the config (weierstrass takes
// alpha_target as its first parameter).
GeneratorSpec path_generator(const ExperimentConfig& config);

}  // namespace roughcalc
