#include "roughcalc/commands.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "roughcalc/calculus.hpp"
#include "roughcalc/parallel.hpp"
#include "roughcalc/random.hpp"
#include "roughcalc/rough_lift.hpp"

namespace roughcalc {
namespace {

MatrixPath make_gamma(const PerturbationSpec& spec, const TimeGrid& grid, std::size_t d) {
  switch (spec.kind) {
    case PerturbationSpec::Kind::none:
      return zero_gamma(grid, d);
    case PerturbationSpec::Kind::linear_matrix:
      return linear_gamma(grid, Tensor2(d, spec.coefficients));
    case PerturbationSpec::Kind::lipschitz_seeded:
      return lipschitz_gamma(grid, d, spec.amplitude, spec.seed);
  }
  return zero_gamma(grid, d);
}

CubePath make_eta(const PerturbationSpec& spec, const TimeGrid& grid, std::size_t d) {
  switch (spec.kind) {
    case PerturbationSpec::Kind::none:
      return zero_eta(grid, d);
    case PerturbationSpec::Kind::linear_matrix:
      return linear_eta(grid, Tensor3(d, spec.coefficients));
    case PerturbationSpec::Kind::lipschitz_seeded:
      return lipschitz_eta(grid, d, spec.amplitude, spec.seed);
  }
  return zero_eta(grid, d);
}

FunctionC4 make_function(const FunctionSpec& spec, std::size_t d, std::size_t m) {
  if (spec.family == "trig-exp") return FunctionC4::trig_exp(d, m, spec.seed);
  if (spec.family == "composite") return FunctionC4::composite(d, m, spec.seed);
  if (!spec.coefficients.empty()) return FunctionC4::ridge_polynomial(d, m, spec.coefficients);
  return FunctionC4::random_polynomial(d, m, spec.degree.value_or(0), spec.seed);
}

// Largest value seen at a pair (two indices) or triple; ties keep the earliest.
struct Worst {
  double value = 0.0;
  std::array<std::size_t, 3> at{};
  int count = 0;

  void update(double v, std::array<std::size_t, 3> where, int n) {
    if (v > value || count == 0) {
      value = std::max(value, v);
      at = where;
      count = n;
    }
  }
  void merge(const Worst& other) {
    if (other.count != 0 && (other.value > value || count == 0)) *this = other;
  }
  std::string location() const {
    std::string out;
    for (int k = 0; k < count; ++k) {
      if (k) out += ';';
      out += std::to_string(at[k]);
    }
    return out;
  }
};

enum Relation {
  kChen2, kChen3, kShuffle1, kShuffle2, kShuffle3,
  kReduced2, kReduced3, kBracket2, kBracket3, kRelationCount
};

constexpr std::array<const char*, kRelationCount> kRelationNames = {
    "chen_level2",         "chen_level3",         "shuffle_1",
    "shuffle_2",           "shuffle_3",           "reduced_chen_level2",
    "reduced_chen_level3", "bracket_additivity2", "bracket_additivity3"};

using WorstSet = std::array<Worst, kRelationCount>;

// |whole - left - right| / max(1, |whole|, |left|, |right|) from precomputed norms.
template <int D>
double relative_sum_defect(const Tensor<D>& whole, const Tensor<D>& left, const Tensor<D>& right,
                           double scale) {
  double sq = 0.0;
  for (std::size_t k = 0; k < whole.size(); ++k) {
    const double r = whole[k] - left[k] - right[k];
    sq += r * r;
  }
  return std::sqrt(sq) / scale;
}

// Level-2 entry (0, 0) of the evaluated pair over the corrupted interval is
// shifted; stored values are untouched.
class LevelSource {
 public:
  LevelSource(const RoughPath3& rp, const ExperimentConfig& config, bool tabulate)
      : rp_(rp) {
    if (tabulate) table_.emplace(rp);
    if (config.validate_corrupt_interval) {
      const std::size_t k = *config.validate_corrupt_interval;
      if (k + 1 >= rp.grid().size()) throw ConfigError("validate.corrupt_interval beyond the grid");
      corrupt_ = k;
      corrupted_ = rp.evaluate(k, k + 1);
      corrupted_.x2[0] += config.validate_corrupt_amount;
      corrupted_norms_ = level_norms(corrupted_);
    }
  }

  LevelTriple get(std::size_t i, std::size_t j) const {
    if (corrupt_ && i == *corrupt_ && j == i + 1) return corrupted_;
    if (table_) return table_->at(i, j);
    return rp_.evaluate(i, j);
  }

  const LevelTriple& ref(std::size_t i, std::size_t j) const {
    if (corrupt_ && i == *corrupt_ && j == i + 1) return corrupted_;
    return table_->at(i, j);
  }

  const LevelNorms& norms(std::size_t i, std::size_t j) const {
    if (corrupt_ && i == *corrupt_ && j == i + 1) return corrupted_norms_;
    return table_->norms(i, j);
  }

 private:
  const RoughPath3& rp_;
  std::optional<LiftTable> table_;
  std::optional<std::size_t> corrupt_;
  LevelTriple corrupted_;
  LevelNorms corrupted_norms_;
};

void check_pair(const LevelTriple& levels, std::size_t i, std::size_t j, WorstSet& worst) {
  const ShuffleDefect sd = shuffle_defect(levels);
  const std::array<std::size_t, 3> loc{i, j, 0};
  worst[kShuffle1].update(sd.relative_first(), loc, 2);
  worst[kShuffle2].update(sd.relative_second(), loc, 2);
  worst[kShuffle3].update(sd.relative_third(), loc, 2);
}

// Reduced levels and brackets of one interval.
struct PairData {
  ReducedLevels levels;
  Tensor2 bracket2;
  Tensor3 bracket3;
  double norm_b2 = 0.0;
  double norm_b3 = 0.0;
};

PairData pair_data(const ReducedRoughPath& r, std::size_t i, std::size_t j) {
  PairData out{reduced_levels(r, i, j), bracket2_from_levels(r, i, j),
               bracket3_from_levels(r, i, j)};
  out.norm_b2 = frobenius_norm(out.bracket2);
  out.norm_b3 = frobenius_norm(out.bracket3);
  return out;
}

// Everything the triple checks need about one interval.
struct Piece {
  const LevelTriple& levels;
  const LevelNorms& norms;
  const PairData& reduced;
};

struct TripleScratch {
  ChenDefect chen;
  ReducedChenWorkspace reduced;
};

void check_triple(const Piece& st, const Piece& su, const Piece& ut,
                  std::array<std::size_t, 3> loc, TripleScratch& scratch, WorstSet& worst) {
  const ChenDefect& cd = scratch.chen;
  chen_defect_into(st.levels, su.levels, ut.levels, st.norms, su.norms, ut.norms, scratch.chen);
  worst[kChen2].update(cd.relative2(), loc, 3);
  worst[kChen3].update(cd.relative3(), loc, 3);
  reduced_chen_defect_into(st.reduced.levels, su.reduced.levels, ut.reduced.levels,
                           scratch.reduced);
  const ReducedChenDefect& rd = scratch.reduced.defect;
  worst[kReduced2].update(rd.relative2(), loc, 3);
  worst[kReduced3].update(rd.relative3(), loc, 3);
  const double scale2 = std::max({1.0, st.reduced.norm_b2, su.reduced.norm_b2, ut.reduced.norm_b2});
  const double scale3 = std::max({1.0, st.reduced.norm_b3, su.reduced.norm_b3, ut.reduced.norm_b3});
  worst[kBracket2].update(
      relative_sum_defect(st.reduced.bracket2, su.reduced.bracket2, ut.reduced.bracket2, scale2),
      loc, 3);
  worst[kBracket3].update(
      relative_sum_defect(st.reduced.bracket3, su.reduced.bracket3, ut.reduced.bracket3, scale3),
      loc, 3);
}

WorstSet exhaustive_scan(const LevelSource& source, const ReducedRoughPath& r) {
  const std::size_t n = r.grid().size();
  std::vector<std::vector<PairData>> pairs(n);  // pairs[i][j - i - 1]
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) pairs[i].push_back(pair_data(r, i, j));
  });
  auto pair = [&pairs](std::size_t i, std::size_t j) -> const PairData& {
    return pairs[i][j - i - 1];
  };

  std::vector<WorstSet> per_start(n);
  parallel_for(n, [&](std::size_t i) {
    WorstSet& worst = per_start[i];
    TripleScratch scratch;
    for (std::size_t j = i + 1; j < n; ++j) {
      check_pair(source.ref(i, j), i, j, worst);
      for (std::size_t u = i + 1; u < j; ++u) {
        check_triple({source.ref(i, j), source.norms(i, j), pair(i, j)},
                     {source.ref(i, u), source.norms(i, u), pair(i, u)},
                     {source.ref(u, j), source.norms(u, j), pair(u, j)}, {i, u, j}, scratch, worst);
      }
    }
  });
  WorstSet total;
  for (const WorstSet& w : per_start) {
    for (int k = 0; k < kRelationCount; ++k) total[k].merge(w[k]);
  }
  return total;
}

std::array<std::size_t, 3> random_triple(const CounterRng& rng, std::uint64_t& counter,
                                         std::size_t n) {
  while (true) {
    std::array<std::size_t, 3> t{};
    for (auto& v : t) {
      v = std::min(n - 1, static_cast<std::size_t>(rng.uniform(counter++) * static_cast<double>(n)));
    }
    std::sort(t.begin(), t.end());
    if (t[0] < t[1] && t[1] < t[2]) return t;
  }
}

WorstSet sampled_scan(const LevelSource& source, const ReducedRoughPath& r,
                      const ExperimentConfig& config) {
  const std::size_t n = r.grid().size();
  const CounterRng rng(config.path_seed.value_or(0), 0x56414c);
  std::uint64_t counter = 0;
  std::vector<std::array<std::size_t, 3>> triples(config.validate_max_triples);
  for (auto& t : triples) t = random_triple(rng, counter, n);

  std::vector<WorstSet> per_triple(triples.size());
  parallel_for(triples.size(), [&](std::size_t k) {
    const auto [i, u, j] = triples[k];
    TripleScratch scratch;
    const LevelTriple st = source.get(i, j);
    const LevelTriple su = source.get(i, u);
    const LevelTriple ut = source.get(u, j);
    const LevelNorms nst = level_norms(st), nsu = level_norms(su), nut = level_norms(ut);
    const PairData rst = pair_data(r, i, j), rsu = pair_data(r, i, u), rut = pair_data(r, u, j);
    check_pair(st, i, j, per_triple[k]);
    check_triple({st, nst, rst}, {su, nsu, rsu}, {ut, nut, rut}, {i, u, j}, scratch,
                 per_triple[k]);
  });
  WorstSet total;
  for (const WorstSet& w : per_triple) {
    for (int k = 0; k < kRelationCount; ++k) total[k].merge(w[k]);
  }
  return total;
}

std::string breakdown_header(std::size_t codim) {
  std::string header = "level,mesh";
  for (const char* name : {"lhs", "rhs_rough", "rhs_young2", "rhs_young3"}) {
    if (codim == 1) {
      header += std::string(",") + name;
    } else {
      for (std::size_t c = 1; c <= codim; ++c) header += "," + std::string(name) + "_" + std::to_string(c);
    }
  }
  return header + ",residual\n";
}

std::string breakdown_row(const ItoBreakdown& b) {
  std::string row = std::to_string(b.level) + "," + format_double(b.mesh);
  for (const Tensor1* v : {&b.lhs, &b.rough, &b.young2, &b.young3}) {
    for (double e : v->entries()) row += "," + format_double(e);
  }
  return row + "," + format_double(b.residual) + "\n";
}

}  // namespace

Experiment build_experiment(const ExperimentConfig& config) {
  try {
    const TimeGrid grid = TimeGrid::dyadic(config.levels_max, config.horizon);
    const GeneratorSpec spec = path_generator(config);
    SampledPath path = config.path_knots_level
                           ? interpolate_linear(
                                 sample(spec, TimeGrid::dyadic(*config.path_knots_level, config.horizon),
                                        config.dimension),
                                 grid)
                           : sample(spec, grid, config.dimension);
    const std::size_t d = config.dimension;
    ReducedRoughPath reduced = perturb(canonical_reduced(path), make_gamma(config.gamma, grid, d),
                                       make_eta(config.eta, grid, d));
    return {std::move(reduced), make_function(config.function, d, config.codomain)};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("cannot build experiment: ") + e.what());
  }
}

CommandResult run_validate(const ExperimentConfig& config) {
  const Experiment exp = build_experiment(config);
  const ReducedRoughPath& r = exp.reduced;
  const RoughPath3 rp = lift_piecewise_linear(r.path());
  const bool exhaustive = r.grid().intervals() <= kExhaustiveValidateIntervals;
  const LevelSource source(rp, config, exhaustive);
  const WorstSet worst = exhaustive ? exhaustive_scan(source, r) : sampled_scan(source, r, config);

  CommandResult result;
  std::ostringstream csv;
  csv << "relation,worst_defect,advisory_defect,pair_or_triple,status\n";
  int failures = 0;
  for (int k = 0; k < kRelationCount; ++k) {
    const bool advisory = k == kReduced3 && !r.gamma_constant();
    const std::string value = format_double(worst[k].value);
    std::string status = "advisory";
    if (!advisory) {
      const bool pass = worst[k].value <= config.validate_tolerance;
      status = pass ? "pass" : "fail";
      failures += pass ? 0 : 1;
    }
    csv << kRelationNames[k] << ',' << (advisory ? "" : value) << ',' << (advisory ? value : "")
        << ',' << worst[k].location() << ',' << status << '\n';
  }
  result.csv = csv.str();
  result.exit_code = failures == 0 ? kExitPass : kExitNumericFailure;
  result.message = failures == 0 ? "validate: all relations within tolerance"
                                 : "validate: " + std::to_string(failures) + " relation(s) exceed tolerance";
  return result;
}

CommandResult run_ito(const ExperimentConfig& config) {
  const Experiment exp = build_experiment(config);
  const std::size_t count = static_cast<std::size_t>(config.levels_max - config.levels_min + 1);
  std::vector<ItoBreakdown> rows(count);
  parallel_for(count, [&](std::size_t k) {
    rows[k] = ito_breakdown(exp.function, exp.reduced, config.levels_min + static_cast<int>(k));
  });

  CommandResult result;
  result.csv = breakdown_header(config.codomain);
  for (const ItoBreakdown& row : rows) result.csv += breakdown_row(row);
  const double final_residual = rows.back().residual;
  const bool pass = final_residual <= config.ito_threshold;
  result.exit_code = pass ? kExitPass : kExitNumericFailure;
  result.message = "ito: residual " + format_double(final_residual) + " at level " +
                   std::to_string(rows.back().level) + (pass ? " within" : " exceeds") +
                   " threshold " + format_double(config.ito_threshold);
  return result;
}

CommandResult run_converge(const ExperimentConfig& config) {
  if (config.levels_min < 4 || config.levels_max - config.levels_min + 1 < 4) {
    throw ConfigError("converge needs levels.min >= 4 and at least 4 levels");
  }
  if (config.converge_sewing_halvings > config.levels_max) {
    throw ConfigError("converge.sewing_halvings exceeds levels.max");
  }
  const Experiment exp = build_experiment(config);
  const ReducedRoughPath& r = exp.reduced;
  const ConvergenceStudy study =
      convergence_study(exp.function, r, config.levels_min, config.levels_max);

  const ReducedRoughPath canonical = canonical_reduced(r.path());
  const auto triples =
      nested_midpoint_triples(r.grid(), 0, r.grid().intervals(), config.converge_sewing_halvings);
  const SewingProbe probe = sewing_defect_probe(exp.function, canonical, triples);

  const Tensor1 lhs = exp.function.value(r.path()[r.grid().size() - 1]) - exp.function.value(r.path()[0]);
  const double final_residual = study.rows.back().residual;
  const double final_bound = config.converge_relative_tolerance * std::max(1.0, frobenius_norm(lhs));

  std::ostringstream csv;
  csv << "kind,level,mesh,value\n";
  for (const ConvergenceRow& row : study.rows) {
    csv << "residual," << row.level << ',' << format_double(row.mesh) << ','
        << format_double(row.residual) << '\n';
  }
  csv << "observed_order,,," << format_double(study.observed_order) << '\n';
  csv << "monotone,,," << (study.monotone ? 1 : 0) << '\n';
  csv << "sewing_exponent,,," << format_double(probe.exponent) << '\n';

  std::vector<std::string> failed;
  if (!study.monotone) failed.push_back("residuals not monotone");
  if (!(study.observed_order >= config.converge_min_order)) failed.push_back("observed order too low");
  if (!(probe.exponent > config.converge_min_sewing_exponent)) failed.push_back("sewing exponent too low");
  if (!(final_residual <= final_bound)) failed.push_back("final residual above bound");

  CommandResult result;
  result.csv = csv.str();
  result.exit_code = failed.empty() ? kExitPass : kExitNumericFailure;
  result.message = "converge: order " + format_double(study.observed_order) + ", sewing exponent " +
                   format_double(probe.exponent) + ", final residual " + format_double(final_residual);
  for (const std::string& f : failed) result.message += "; " + f;
  return result;
}

}  // namespace roughcalc
