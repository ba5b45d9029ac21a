// roughcalc validate|ito|converge --config <file> --out <csv>
//           [--tolerance <float>] [--seed <u64>]
//
// Exit codes: 0 all checks pass, 1 numeric check failed, 2 config error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "roughcalc/commands.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
};

void add_options(CLI::App* sub, Options& opts) {
  sub->add_option("--config", opts.config, "experiment config file")->required();
  sub->add_option("--out", opts.out, "CSV report path")->required();
  sub->add_option("--tolerance", opts.tolerance, "override the command's pass tolerance");
  sub->add_option("--seed", opts.seed, "override path.seed");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace roughcalc;
  CLI::App app{"Reduced rough path experiments: algebraic validators, Ito residuals, convergence"};
  app.require_subcommand(1);
  Options opts;
  CLI::App* validate = app.add_subcommand("validate", "check Chen, shuffle, reduced Chen and bracket relations");
  CLI::App* ito = app.add_subcommand("ito", "Ito-formula breakdown per dyadic level");
  CLI::App* converge = app.add_subcommand("converge", "residual convergence order and sewing exponent");
  for (CLI::App* sub : {validate, ito, converge}) add_options(sub, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  CommandResult result;
  try {
    ExperimentConfig config = load_config(opts.config);
    if (opts.seed) config.path_seed = *opts.seed;
    if (opts.tolerance) {
      if (!(*opts.tolerance > 0.0)) throw ConfigError("--tolerance must be positive");
      if (validate->parsed()) config.validate_tolerance = *opts.tolerance;
      if (ito->parsed()) config.ito_threshold = *opts.tolerance;
      if (converge->parsed()) config.converge_relative_tolerance = *opts.tolerance;
    }
    if (validate->parsed()) result = run_validate(config);
    else if (ito->parsed()) result = run_ito(config);
    else result = run_converge(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumericFailure;
  }

  std::ofstream out(opts.out, std::ios::binary);
  out << result.csv;
  out.close();
  if (!out) {
    std::cerr << "config error: cannot write '" << opts.out << "'\n";
    return kExitConfigError;
  }
  std::cerr << result.message << '\n';
  return result.exit_code;
}
