#include "roughcalc/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace roughcalc {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double parse_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text.front() == '-') throw std::invalid_argument("negative");
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw ConfigError("key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const std::uint64_t v = parse_unsigned(key, text);
  if (v > 1000) throw ConfigError("key '" + key + "': value " + text + " is out of range");
  return static_cast<int>(v);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(parse_real(key, trim(item)));
  return out;
}

PerturbationSpec::Kind parse_perturbation_kind(const std::string& key, const std::string& text) {
  if (text == "none") return PerturbationSpec::Kind::none;
  if (text == "linear-matrix") return PerturbationSpec::Kind::linear_matrix;
  if (text == "lipschitz-seeded") return PerturbationSpec::Kind::lipschitz_seeded;
  throw ConfigError("key '" + key + "': unknown perturbation kind '" + text + "'");
}

std::string to_string(PerturbationSpec::Kind kind) {
  switch (kind) {
    case PerturbationSpec::Kind::none: return "none";
    case PerturbationSpec::Kind::linear_matrix: return "linear-matrix";
    case PerturbationSpec::Kind::lipschitz_seeded: return "lipschitz-seeded";
  }
  return "none";
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

void add_perturbation_keys(std::map<std::string, Setter>& keys, const std::string& section,
                           PerturbationSpec ExperimentConfig::*member) {
  keys[section + ".kind"] = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
    (c.*member).kind = parse_perturbation_kind(k, v);
  };
  keys[section + ".coefficients"] = [member](ExperimentConfig& c, const std::string& k,
                                             const std::string& v) {
    (c.*member).coefficients = parse_list(k, v);
  };
  keys[section + ".amplitude"] = [member](ExperimentConfig& c, const std::string& k,
                                          const std::string& v) {
    (c.*member).amplitude = parse_real(k, v);
  };
  keys[section + ".seed"] = [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
    (c.*member).seed = parse_unsigned(k, v);
  };
}

const std::map<std::string, Setter>& key_table() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> keys;
    keys["dimension"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.dimension = parse_unsigned(k, v);
    };
    keys["codomain"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.codomain = parse_unsigned(k, v);
    };
    keys["horizon"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.horizon = parse_real(k, v);
    };
    keys["alpha_target"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.alpha_target = parse_real(k, v);
    };
    keys["path.kind"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      try {
        c.path_kind = parse_generator_kind(v);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("key '" + k + "': " + e.what());
      }
    };
    keys["path.coefficients"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.path_coefficients = parse_list(k, v);
    };
    keys["path.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.path_seed = parse_unsigned(k, v);
    };
    keys["path.knots_level"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.path_knots_level = parse_int(k, v);
    };
    add_perturbation_keys(keys, "gamma", &ExperimentConfig::gamma);
    add_perturbation_keys(keys, "eta", &ExperimentConfig::eta);
    keys["function.family"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      if (v != "polynomial" && v != "trig-exp" && v != "composite") {
        throw ConfigError("key '" + k + "': unknown function family '" + v + "'");
      }
      c.function.family = v;
    };
    keys["function.coefficients"] = [](ExperimentConfig& c, const std::string& k,
                                       const std::string& v) {
      c.function.coefficients = parse_list(k, v);
    };
    keys["function.degree"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.function.degree = parse_int(k, v);
    };
    keys["function.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.function.seed = parse_unsigned(k, v);
    };
    keys["levels.min"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.levels_min = parse_int(k, v);
    };
    keys["levels.max"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.levels_max = parse_int(k, v);
    };
    keys["validate.tolerance"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.validate_tolerance = parse_real(k, v);
    };
    keys["validate.max_triples"] = [](ExperimentConfig& c, const std::string& k,
                                      const std::string& v) {
      c.validate_max_triples = parse_unsigned(k, v);
    };
    keys["validate.corrupt_interval"] = [](ExperimentConfig& c, const std::string& k,
                                           const std::string& v) {
      c.validate_corrupt_interval = parse_unsigned(k, v);
    };
    keys["validate.corrupt_amount"] = [](ExperimentConfig& c, const std::string& k,
                                         const std::string& v) {
      c.validate_corrupt_amount = parse_real(k, v);
    };
    keys["ito.threshold"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.ito_threshold = parse_real(k, v);
    };
    keys["converge.min_order"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
      c.converge_min_order = parse_real(k, v);
    };
    keys["converge.min_sewing_exponent"] = [](ExperimentConfig& c, const std::string& k,
                                              const std::string& v) {
      c.converge_min_sewing_exponent = parse_real(k, v);
    };
    keys["converge.relative_tolerance"] = [](ExperimentConfig& c, const std::string& k,
                                             const std::string& v) {
      c.converge_relative_tolerance = parse_real(k, v);
    };
    keys["converge.sewing_halvings"] = [](ExperimentConfig& c, const std::string& k,
                                          const std::string& v) {
      c.converge_sewing_halvings = parse_int(k, v);
    };
    return keys;
  }();
  return table;
}

void check_perturbation(const PerturbationSpec& p, const char* section, std::size_t entries) {
  const std::string name(section);
  if (p.kind == PerturbationSpec::Kind::linear_matrix && p.coefficients.size() != entries) {
    throw ConfigError(name + ".coefficients: linear-matrix needs " + std::to_string(entries) +
                      " entries, got " + std::to_string(p.coefficients.size()));
  }
}

void validate(const ExperimentConfig& c) {
  if (c.dimension < 1 || c.dimension > 8) throw ConfigError("dimension must be in [1, 8]");
  if (c.codomain < 1 || c.codomain > 16) throw ConfigError("codomain must be in [1, 16]");
  if (!(c.horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (c.levels_min < 1 || c.levels_max > 20 || c.levels_min > c.levels_max) {
    throw ConfigError("levels must satisfy 1 <= levels.min <= levels.max <= 20 (empty grid range)");
  }
  if (c.path_knots_level && (*c.path_knots_level < 1 || *c.path_knots_level > c.levels_max)) {
    throw ConfigError("path.knots_level must be in [1, levels.max]");
  }
  if (!(c.alpha_target > 0.0 && c.alpha_target <= 1.0)) {
    throw ConfigError("alpha_target must lie in (0, 1]");
  }
  const std::size_t d = c.dimension;
  check_perturbation(c.gamma, "gamma", d * d);
  check_perturbation(c.eta, "eta", d * d * d);
  if (c.function.family == "polynomial" && c.function.coefficients.empty() && !c.function.degree) {
    throw ConfigError("polynomial function needs function.coefficients or function.degree");
  }
  for (const auto& [key, value] : {std::pair{"validate.tolerance", c.validate_tolerance},
                                   std::pair{"ito.threshold", c.ito_threshold},
                                   std::pair{"converge.relative_tolerance", c.converge_relative_tolerance}}) {
    if (!(value > 0.0)) throw ConfigError(std::string(key) + " must be positive");
  }
  if (c.converge_sewing_halvings < 3) throw ConfigError("converge.sewing_halvings must be >= 3");
}

}  // namespace

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream stream{std::string(text)};
  std::string raw;
  int line_no = 0;
  const auto& keys = key_table();
  while (std::getline(stream, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    const auto it = keys.find(key);
    if (it == keys.end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    it->second(config, key, value);
  }
  for (const char* required : {"dimension", "path.kind", "levels.min", "levels.max"}) {
    if (!seen.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  }
  validate(config);
  return config;
}

ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file '" + file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::ostringstream out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  line("dimension", std::to_string(c.dimension));
  line("codomain", std::to_string(c.codomain));
  line("horizon", format_double(c.horizon));
  line("alpha_target", format_double(c.alpha_target));
  line("path.kind", to_string(c.path_kind));
  line("path.coefficients", join(c.path_coefficients));
  if (c.path_seed) line("path.seed", std::to_string(*c.path_seed));
  if (c.path_knots_level) line("path.knots_level", std::to_string(*c.path_knots_level));
  for (const auto& [name, p] : {std::pair<const char*, const PerturbationSpec*>{"gamma", &c.gamma},
                                {"eta", &c.eta}}) {
    const std::string section(name);
    line(section + ".kind", to_string(p->kind));
    line(section + ".coefficients", join(p->coefficients));
    line(section + ".amplitude", format_double(p->amplitude));
    line(section + ".seed", std::to_string(p->seed));
  }
  line("function.family", c.function.family);
  line("function.coefficients", join(c.function.coefficients));
  if (c.function.degree) line("function.degree", std::to_string(*c.function.degree));
  line("function.seed", std::to_string(c.function.seed));
  line("levels.min", std::to_string(c.levels_min));
  line("levels.max", std::to_string(c.levels_max));
  line("validate.tolerance", format_double(c.validate_tolerance));
  line("validate.max_triples", std::to_string(c.validate_max_triples));
  if (c.validate_corrupt_interval) {
    line("validate.corrupt_interval", std::to_string(*c.validate_corrupt_interval));
  }
  line("validate.corrupt_amount", format_double(c.validate_corrupt_amount));
  line("ito.threshold", format_double(c.ito_threshold));
  line("converge.min_order", format_double(c.converge_min_order));
  line("converge.min_sewing_exponent", format_double(c.converge_min_sewing_exponent));
  line("converge.relative_tolerance", format_double(c.converge_relative_tolerance));
  line("converge.sewing_halvings", std::to_string(c.converge_sewing_halvings));
  return out.str();
}

GeneratorSpec path_generator(const ExperimentConfig& config) {
  GeneratorSpec spec{config.path_kind, config.path_coefficients, config.path_seed};
  if (config.path_kind == GeneratorKind::weierstrass) {
    spec.params.insert(spec.params.begin(), config.alpha_target);
  }
  return spec;
}

}  // namespace roughcalc
