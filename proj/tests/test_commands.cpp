#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "roughcalc/commands.hpp"

using namespace roughcalc;
namespace fs = std::filesystem;

namespace {

const char* kWalk3 =
    "dimension = 3\npath.kind = random-walk\npath.seed = 7\nlevels.min = 5\nlevels.max = 6\n"
    "function.coefficients = 0,0,1\n";

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string row_for(const std::string& csv, const std::string& first) {
  for (const std::string& line : lines(csv)) {
    if (line.rfind(first + ",", 0) == 0) return line;
  }
  return "";
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Scratch {
 public:
  Scratch() : dir_(fs::temp_directory_path() / ("roughcalc_test_" + std::to_string(::getpid()))) {
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name, std::ios::binary) << text;
    return dir_ / name;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ROUGHCALC_CLI_PATH) + " " + args + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_file(const std::string& name) {
  return std::string(ROUGHCALC_CONFIG_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("validate passes on a lifted random walk") {
  const CommandResult r = run_validate(parse_config(kWalk3));
  CHECK(r.exit_code == kExitPass);
  const auto rows = lines(r.csv);
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "relation,worst_defect,advisory_defect,pair_or_triple,status");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto c = cells(rows[k]);
    REQUIRE(c.size() == 5);
    CHECK(c[4] == "pass");
    CHECK(std::stod(c[1]) <= 1e-12);
  }
}

TEST_CASE("validate reports the level-3 reduced Chen residual as advisory under gamma") {
  const CommandResult r = run_validate(parse_config(
      std::string(kWalk3) + "gamma.kind = lipschitz-seeded\ngamma.seed = 3\n"));
  CHECK(r.exit_code == kExitPass);
  const auto c = cells(row_for(r.csv, "reduced_chen_level3"));
  REQUIRE(c.size() == 5);
  CHECK(c[1].empty());
  CHECK(std::stod(c[2]) > 1e-6);
  CHECK(c[4] == "advisory");
  CHECK(cells(row_for(r.csv, "reduced_chen_level2"))[4] == "pass");
}

TEST_CASE("validate localizes a corrupted level-2 entry") {
  const CommandResult r = run_validate(parse_config(
      std::string(kWalk3) + "validate.corrupt_interval = 20\nvalidate.corrupt_amount = 1e-6\n"));
  CHECK(r.exit_code == kExitNumericFailure);
  const auto chen = cells(row_for(r.csv, "chen_level2"));
  CHECK(chen[4] == "fail");
  CHECK(std::stod(chen[1]) == doctest::Approx(1e-6).epsilon(1e-3));
  CHECK(chen[3].rfind("20;21;", 0) == 0);
  const auto shuffle = cells(row_for(r.csv, "shuffle_1"));
  CHECK(shuffle[3] == "20;21");
  CHECK(shuffle[4] == "fail");
}

TEST_CASE("validate samples triples on larger grids") {
  const CommandResult r = run_validate(parse_config(
      "dimension = 2\npath.kind = random-walk\npath.seed = 5\nlevels.min = 9\nlevels.max = 9\n"
      "function.coefficients = 0,1\nvalidate.max_triples = 2000\n"));
  CHECK(r.exit_code == kExitPass);
  CHECK(lines(r.csv).size() == 10);
}

TEST_CASE("ito reproduces the classical example") {
  const CommandResult r = run_ito(load_config(config_file("ito_classical.cfg")));
  CHECK(r.exit_code == kExitPass);
  const auto rows = lines(r.csv);
  CHECK(rows[0] == "level,mesh,lhs,rhs_rough,rhs_young2,rhs_young3,residual");
  REQUIRE(rows.size() == 10);
  const auto last = cells(rows.back());
  CHECK(last[0] == "12");
  CHECK(std::stod(last[2]) == 1.0);
  CHECK(std::abs(std::stod(last[3])) <= 1e-12);
  CHECK(std::stod(last[4]) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::stod(last[6]) <= 1e-9);
}

TEST_CASE("ito columns for linear F and for the canonical path") {
  const CommandResult lin = run_ito(parse_config(
      "dimension = 2\ncodomain = 2\npath.kind = random-walk\npath.seed = 3\nlevels.min = 4\n"
      "levels.max = 8\nfunction.coefficients = 0,1\ngamma.kind = lipschitz-seeded\n"));
  CHECK(lin.exit_code == kExitPass);
  const auto rows = lines(lin.csv);
  CHECK(rows[0] ==
        "level,mesh,lhs_1,lhs_2,rhs_rough_1,rhs_rough_2,rhs_young2_1,rhs_young2_2,rhs_young3_1,"
        "rhs_young3_2,residual");
  for (std::size_t k = 1; k < rows.size(); ++k) CHECK(std::stod(cells(rows[k]).back()) <= 1e-12);

  const CommandResult canon = run_ito(parse_config(
      "dimension = 2\npath.kind = random-walk\npath.seed = 3\nlevels.min = 4\nlevels.max = 8\n"
      "function.family = polynomial\nfunction.degree = 3\nfunction.seed = 2\n"));
  for (const std::string& row : lines(canon.csv)) {
    if (row.rfind("level", 0) == 0) continue;
    const auto c = cells(row);
    CHECK(c[4] == "0");
    CHECK(c[5] == "0");
  }
}

TEST_CASE("converge on a smooth path") {
  const CommandResult r = run_converge(load_config(config_file("converge_smooth_quartic.cfg")));
  CHECK(r.exit_code == kExitPass);
  CHECK(std::stod(cells(row_for(r.csv, "observed_order"))[3]) >= 1.0);
  CHECK(std::stod(cells(row_for(r.csv, "sewing_exponent"))[3]) >= 3.5);
  CHECK(cells(row_for(r.csv, "monotone"))[3] == "1");
}

TEST_CASE("converge needs four levels") {
  CHECK_THROWS_AS(run_converge(parse_config(
                      "dimension = 1\npath.kind = polynomial\npath.coefficients = 0,1\n"
                      "levels.min = 4\nlevels.max = 6\nfunction.coefficients = 0,0,1\n")),
                  ConfigError);
}

TEST_CASE("builder failures are config errors") {
  CHECK_THROWS_AS(build_experiment(parse_config(
                      "dimension = 1\npath.kind = weierstrass\npath.coefficients = 2,3\n"
                      "levels.min = 4\nlevels.max = 5\nfunction.coefficients = 0,1\n")),
                  ConfigError);
}

TEST_CASE("commands are deterministic") {
  const ExperimentConfig c = load_config(config_file("validate_random_walk.cfg"));
  CHECK(run_validate(c).csv == run_validate(c).csv);
  const ExperimentConfig w = load_config(config_file("converge_smooth_quartic.cfg"));
  CHECK(run_converge(w).csv == run_converge(w).csv);
  CHECK(run_ito(w).csv == run_ito(w).csv);
}

TEST_CASE("the CLI maps outcomes to exit codes") {
  Scratch tmp;
  const std::string out = tmp.path("out.csv").string();
  CHECK(run_cli("ito --config " + config_file("ito_classical.cfg") + " --out " + out) == 0);
  CHECK(read_file(out).rfind("level,mesh,lhs", 0) == 0);

  const fs::path empty = tmp.write("empty.cfg", "");
  CHECK(run_cli("validate --config " + empty.string() + " --out " + out) == 2);
  CHECK(run_cli("validate --config /nonexistent.cfg --out " + out) == 2);
  CHECK(run_cli("validate --out " + out) == 2);
  CHECK(run_cli("frobnicate --config x --out y") == 2);
  CHECK(run_cli("validate --config " + config_file("validate_random_walk.cfg") + " --out " + out +
                " --tolerance -1") == 2);

  const fs::path corrupt = tmp.write(
      "corrupt.cfg", std::string(kWalk3) + "validate.corrupt_interval = 3\n");
  CHECK(run_cli("validate --config " + corrupt.string() + " --out " + out) == 1);
  CHECK(run_cli("validate --config " + corrupt.string() + " --out " + out + " --tolerance 1e-3") == 0);
}

TEST_CASE("the CLI overrides the seed and the tolerance") {
  Scratch tmp;
  const fs::path cfg = tmp.write("walk.cfg", kWalk3);
  const std::string a = tmp.path("a.csv").string();
  const std::string b = tmp.path("b.csv").string();
  const std::string c = tmp.path("c.csv").string();
  CHECK(run_cli("validate --config " + cfg.string() + " --out " + a) == 0);
  CHECK(run_cli("validate --config " + cfg.string() + " --out " + b + " --seed 7") == 0);
  CHECK(run_cli("validate --config " + cfg.string() + " --out " + c + " --seed 8") == 0);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(a) != read_file(c));
  CHECK(run_cli("validate --config " + cfg.string() + " --out " + a + " --tolerance 1e-30") == 1);
  CHECK(run_cli("ito --config " + config_file("converge_smooth_quartic.cfg") + " --out " + a +
                " --tolerance 1e-30") == 1);
  CHECK(run_cli("ito --config " + config_file("converge_smooth_quartic.cfg") + " --out " + a +
                " --tolerance 1") == 0);
}
