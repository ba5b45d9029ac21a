#pragma once

// The three experiment commands behind the CLI. Each returns its CSV report
// and exit code instead of touching the filesystem.

#include <string>

#include "roughcalc/config.hpp"
#include "roughcalc/functions.hpp"
#include "roughcalc/reduced.hpp"

namespace roughcalc {

inline constexpr int kExitPass = 0;
inline constexpr int kExitNumericFailure = 1;
inline constexpr int kExitConfigError = 2;

struct CommandResult {
  int exit_code = kExitPass;
  std::string csv;
  std::string message;  // one-line summary or diagnostic
};

struct Experiment {
  ReducedRoughPath reduced;
  FunctionC4 function;
};

// Path on the dyadic level-levels_max grid, perturbed by gamma/eta, and the
// configured function. Builder failures surface as ConfigError.
Experiment build_experiment(const ExperimentConfig& config);

// Exhaustive over grid triples when the grid has at most 256 intervals,
// otherwise validate_max_triples seeded random triples.
inline constexpr std::size_t kExhaustiveValidateIntervals = 256;

CommandResult run_validate(const ExperimentConfig& config);
CommandResult run_ito(const ExperimentConfig& config);
CommandResult run_converge(const ExperimentConfig& config);

}  // namespace roughcalc
