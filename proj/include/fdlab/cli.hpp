#pragma once

// Command-line front end: simulate, estimate, table1, bias-audit, oracle-check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdlab/bias_theory.hpp"
#include "fdlab/dataset.hpp"
#include "fdlab/discrete_frontdoor.hpp"
#include "fdlab/documents.hpp"
#include "fdlab/error.hpp"
#include "fdlab/ols.hpp"
#include "fdlab/population.hpp"
#include "fdlab/report.hpp"
#include "fdlab/scenario.hpp"

namespace fdlab::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kDataError = 3,
  kOracleFailure = 4,
};

// Bad flag combinations detected after parsing.
class usage_error : public precondition_error {
 public:
  using precondition_error::precondition_error;
};

inline constexpr const char* kSeedEnv = "FDLAB_SEED";
inline constexpr std::uint64_t kFallbackSeed = 42;

inline std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnv)) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw precondition_error(std::string(kSeedEnv) + " must be an unsigned integer");
  }
  return kFallbackSeed;
}

inline std::string dag_name(int dag) { return "DAG" + std::to_string(dag); }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  int dag = 0;
  std::size_t n = 200;
  std::uint64_t seed = 0;
  std::string out;
  std::string truth;
  std::string config;
  bool combined = false;
  std::vector<std::string> set;
};

inline ScenarioConfig scenario_from_args(const SimulateArgs& a, const CLI::App& sub) {
  ScenarioConfig cfg;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw data_error("cannot open config '" + a.config + "'");
    cfg = scenario_from_json(parse_document(in));
  } else {
    cfg.seed = default_seed();
  }
  if (a.config.empty() && !sub.count("--dag"))
    throw usage_error("simulate needs --dag (or --config)");
  if (sub.count("--dag")) cfg.dag = a.dag;
  if (sub.count("--n")) cfg.n = a.n;
  if (sub.count("--seed")) cfg.seed = a.seed;
  for (const auto& kv : a.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw usage_error("--set expects key=value, got '" + kv + "'");
    const auto key = kv.substr(0, eq);
    if (std::find(coefficient_keys().begin(), coefficient_keys().end(), key) ==
        coefficient_keys().end())
      throw usage_error("unknown coefficient '" + key + "'");
    cfg.overrides[key] = parse_double(kv.substr(eq + 1));
  }
  if (cfg.dag < 1 || cfg.dag > 4) throw usage_error("dag must be 1, 2, 3 or 4");
  cfg.validate();
  return cfg;
}

inline void write_csv_file(const Dataset& d, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw data_error("cannot write '" + path + "'");
  d.write_csv(f);
}

inline int cmd_simulate(const SimulateArgs& a, const CLI::App& sub, std::ostream& out) {
  const auto cfg = scenario_from_args(a, sub);
  const auto sim = simulate(cfg);
  write_csv_file(a.combined ? sim.combined() : sim.observed, a.out);
  if (!a.truth.empty()) write_csv_file(sim.truth_table(), a.truth);

  ReportTable t;
  const auto name = dag_name(cfg.dag);
  t.add_truth(name, "ate", sim.truth.ate);
  t.add_truth(name, "pate", sim.truth.pate);
  t.add_truth(name, "other_path_gap", other_path_gap(sim.truth.ate, sim.truth.pate));
  render(t, ReportFormat::human, out);
  return kSuccess;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
  std::string input;
  std::string treatment = "X";
  std::string mediator = "M";
  std::string outcome = "Y";
  std::string instrument;
  std::string format = "human";
};

inline void add_two_step(ReportTable& t, const std::string& scenario, const TwoStepResult& r) {
  t.add_fit(scenario, "Step 1", r.step1);
  t.add_fit(scenario, "Step 2", r.step2);
  t.add_truth(scenario, "fdc_estimate", r.fdc_estimate);
  if (r.treatment_dropped())
    t.notes.push_back(scenario + ": step-2 " + r.treatment + " dropped (collinear with " +
                      r.mediator + ")");
}

inline ReportTable estimate_report(const Dataset& data, const EstimateArgs& a) {
  ReportTable t;
  const auto r = fdc_two_step(data, {a.treatment, a.mediator, a.outcome});
  add_two_step(t, "input", r);
  if (!r.treatment_dropped()) {
    const auto& x = r.step2[r.treatment];
    t.notes.push_back("step-2 " + r.treatment + " coefficient is " +
                      (std::abs(x.t_value) < 3.0 ? "insignificant (|t| < 3)"
                                                 : "significant (|t| >= 3): other X -> Y paths"));
  }
  if (!a.instrument.empty()) {
    const auto iv = iv_2sls(data, {a.instrument, a.treatment, a.outcome});
    t.add_fit("input", "2SLS-1", iv.first_stage);
    t.add_fit("input", "2SLS-2", iv.fit);
    t.add_truth("input", "iv_estimate", iv.estimate());
    if (iv.weak_instrument)
      t.notes.push_back("weak instrument: first-stage |t| < " + format_human(kWeakInstrumentT));
  }
  return t;
}

inline int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const auto format = parse_format(a.format);
  std::ifstream in(a.input);
  if (!in) throw data_error("cannot open '" + a.input + "'");
  const auto data = Dataset::read_csv(in);
  for (const auto* col : {&a.treatment, &a.mediator, &a.outcome, &a.instrument})
    if (!col->empty() && !data.has(*col))
      throw data_error("input has no column named '" + *col + "'");
  render(estimate_report(data, a), format, out);
  return kSuccess;
}

// ---------------------------------------------------------------- table1

struct Table1Args {
  std::size_t n = 200;
  std::uint64_t seed = 0;
  std::string format = "human";
};

// All four DAGs share one seed, so DAG 1 and 2 see the same exogenous draws.
inline ReportTable table1_report(std::size_t n, std::uint64_t seed) {
  ReportTable t;
  for (int dag = 1; dag <= 4; ++dag) {
    ScenarioConfig cfg;
    cfg.dag = dag;
    cfg.n = n;
    cfg.seed = seed;
    const auto sim = simulate(cfg);
    const auto r = fdc_two_step(sim.observed);
    const auto name = dag_name(dag);
    add_two_step(t, name, r);
    t.add_truth(name, "ate", sim.truth.ate);
    t.add_truth(name, "pate", sim.truth.pate);
    t.add_truth(name, "fdc_minus_ate", r.fdc_estimate - sim.truth.ate);
    t.add_truth(name, "other_path_gap", other_path_gap(sim.truth.ate, sim.truth.pate));
    if (cfg.grouped()) {
      const auto p = scenario_mixed_params(cfg);
      const auto b = case2_bias(p);
      t.add_truth(name, "predicted_ate_cal", case2_ate_cal(p));
      t.add_truth(name, "predicted_gamma", b.gamma);
      t.add_truth(name, "predicted_epsilon", b.epsilon);
    }
  }
  return t;
}

inline int cmd_table1(const Table1Args& a, const CLI::App& sub, std::ostream& out) {
  const auto format = parse_format(a.format);
  const auto seed = sub.count("--seed") ? a.seed : default_seed();
  if (a.n < 10) throw usage_error("--n must be at least 10");
  render(table1_report(a.n, seed), format, out);
  return kSuccess;
}

// ---------------------------------------------------------------- bias-audit

struct BiasAuditArgs {
  std::string input;
  std::string format = "human";
};

inline void audit_mixed(ReportTable& t, const MixedPathParams& p) {
  const auto truth = mixed_true_ate(p);
  const auto cal = case2_ate_cal(p);
  const auto b = case2_bias(p);
  t.add_truth("mixed", "true_ate", truth);
  t.add_truth("mixed", "pate", p.c_i * p.p_i * p.m_i);
  t.add_truth("mixed", "other_path_gap", other_path_gap(truth, p.c_i * p.p_i * p.m_i));
  t.add_truth("mixed", "pooled_mediator_effect", pooled_mediator_effect(p));
  t.add_truth("mixed", "pooled_first_step", p.m_i * p.p_i + p.m_j * p.p_j);
  t.add_truth("mixed", "ate_cal", cal);
  t.add_truth("mixed", "gamma", b.gamma);
  t.add_truth("mixed", "epsilon", b.epsilon);
  t.add_truth("mixed", "ate_minus_ate_cal", truth - cal);
  if (std::abs(p.m_i - p.m_j) <= kAlgebraTolerance) {
    t.add_truth("mixed", "case1_ate_cal", case1_ate_cal(p));
    t.notes.push_back("same X -> M function in both populations: no bias");
  } else {
    t.notes.push_back("different X -> M functions: the pooled product is biased by epsilon");
  }
}

inline ReportTable bias_audit_report(const json& doc) {
  ReportTable t;
  const auto kind = document_kind(doc);
  if (kind == "mixed_path") {
    audit_mixed(t, mixed_params_from_json(doc));
    return t;
  }
  if (kind != "population")
    throw data_error("bias-audit expects a population or mixed_path document, got '" + kind + "'");

  const auto pop = population_from_json(doc);
  t.add_truth("population", "true_ate", true_ate(pop));
  if (!pop.all_mediated()) {
    audit_mixed(t, mixed_params_from_population(pop));
    return t;
  }
  const auto c = classify(pop);
  const double pate = true_pate(pop);
  t.add_truth("population", "p_frac", c.p_frac);
  t.add_truth("population", "n_frac", c.n_frac);
  t.add_truth("population", "null_frac", c.null_frac);
  t.add_truth("population", "omega", c.omega);
  t.add_truth("population", "true_pate", pate);
  if (c.p_frac + c.n_frac > 0.0) t.add_truth("population", "true_late", true_late(pop));

  if (c.null_frac == 0.0) {
    const auto h = heterogeneity_bias(pop);
    t.add_truth("population", "heterogeneity_bias", h.bias);
    t.add_truth("population", "calculated_pate", pate - h.bias);
  } else {
    try {
      const double b = null_inclusion_bias(pop);
      t.add_truth("population", "null_inclusion_bias", b);
      t.add_truth("population", "calculated_pate", pate - b);
    } catch (const precondition_error&) {
      t.notes.push_back(
          "units with M(1) = M(0) and heterogeneous p/n effects: exclude the null units, then "
          "audit heterogeneity");
    }
  }
  return t;
}

inline int cmd_bias_audit(const BiasAuditArgs& a, std::ostream& out) {
  const auto format = parse_format(a.format);
  std::ifstream in(a.input);
  if (!in) throw data_error("cannot open '" + a.input + "'");
  render(bias_audit_report(parse_document(in)), format, out);
  return kSuccess;
}

// ---------------------------------------------------------------- oracle-check

struct OracleCheckArgs {
  std::size_t sweeps = 1000;
  std::uint64_t seed = 0;
  bool negate_condition1 = false;
  std::string world;
  std::string dump_world;
  std::string dump_joint;
};

struct SuiteResult {
  std::string name;
  std::size_t cases = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool passed() const { return max_deviation <= tolerance; }
};

inline double max_abs_diff(const Distribution& a, const Distribution& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double distribution_defect(const Distribution& d) {
  double total = 0.0, negative = 0.0;
  for (double p : d) {
    total += p;
    negative = std::max(negative, -p);
  }
  return std::max(std::abs(total - 1.0), negative);
}

// Front-door adjustment vs truncated-factorization oracle over random worlds.
inline std::vector<SuiteResult> frontdoor_suites(std::size_t worlds, std::uint64_t seed,
                                                 bool mediator_intercepts) {
  std::mt19937_64 rng(seed);
  SuiteResult match{"front_door_vs_oracle", 0, 0.0, 1e-10};
  SuiteResult dist{"front_door_is_distribution", 0, 0.0, 1e-10};
  SuiteResult mass{"world_to_joint_mass", 0, 0.0, kMassTolerance};
  for (std::size_t k = 0; k < worlds; ++k) {
    const auto w = random_world(rng, {4, mediator_intercepts});
    const auto joint = world_to_joint(w);
    double total = 0.0;
    for (double p : joint.table()) total += p;
    mass.max_deviation = std::max(mass.max_deviation, std::abs(total - 1.0));
    ++mass.cases;
    for (std::size_t x = 0; x < w.nx(); ++x) {
      const auto fd = front_door_adjust(joint, x);
      match.max_deviation = std::max(match.max_deviation, max_abs_diff(fd, interventional_oracle(w, x)));
      dist.max_deviation = std::max(dist.max_deviation, distribution_defect(fd));
      ++match.cases;
      ++dist.cases;
    }
  }
  return {match, dist, mass};
}

inline MixedPathParams random_mixed_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> share(0.0, 1.0), effect(-3.0, 3.0), resp(-1.0, 1.0),
      mag(0.1, 1.0);
  std::bernoulli_distribution sign(0.5);
  const double p_i = share(rng);
  return {p_i, 1.0 - p_i, effect(rng), effect(rng), resp(rng),
          (sign(rng) ? 1.0 : -1.0) * mag(rng)};
}

// Closed-form biases vs direct algebra / enumeration over random parameters.
inline std::vector<SuiteResult> bias_suites(std::size_t draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xB1A5ULL);
  std::uniform_real_distribution<double> share(0.05, 0.95), effect(-3.0, 3.0);
  SuiteResult case2{"case2_epsilon_identity", 0, 0.0, kAlgebraTolerance};
  SuiteResult case1{"case1_zero_bias", 0, 0.0, kAlgebraTolerance};
  SuiteResult case1_pop{"case1_vs_population_ate", 0, 0.0, kAlgebraTolerance};
  SuiteResult hetero{"heterogeneity_vs_enumeration", 0, 0.0, kAlgebraTolerance};
  SuiteResult nulls{"null_inclusion_vs_enumeration", 0, 0.0, kAlgebraTolerance};
  for (std::size_t k = 0; k < draws; ++k) {
    auto p = random_mixed_params(rng);
    const double eps = case2_bias(p).epsilon;
    case2.max_deviation =
        std::max(case2.max_deviation, std::abs(eps - (mixed_true_ate(p) - case2_ate_cal(p))));
    ++case2.cases;

    p.m_j = p.m_i == 0.0 ? 0.5 : p.m_i;
    p.m_i = p.m_j;
    case1.max_deviation = std::max({case1.max_deviation, std::abs(case2_bias(p).epsilon),
                                    std::abs(case1_ate_cal(p) - mixed_true_ate(p))});
    ++case1.cases;
    case1_pop.max_deviation =
        std::max(case1_pop.max_deviation, std::abs(case1_ate_cal(p) - true_ate(to_population(p))));
    ++case1_pop.cases;

    // Two responsive subgroups with different effects.
    const double pp = share(rng);
    const double ep = effect(rng), en = effect(rng);
    const BinaryPopulation two({{pp, UnitPotentials::mediated(0, 1, 0.0, ep)},
                                {1.0 - pp, UnitPotentials::mediated(1, 0, 0.0, en)}});
    const auto h = heterogeneity_bias(two);
    const double calculated = h.omega * (ep * pp + en * (1.0 - pp));
    hetero.max_deviation =
        std::max(hetero.max_deviation, std::abs(h.bias - (true_pate(two) - calculated)));
    ++hetero.cases;

    // Homogeneous effect tau with a null share.
    const double tau = effect(rng);
    const double resp = share(rng);
    const double p_share = resp * share(rng);
    const double n_share = resp - p_share;
    std::vector<SubgroupSpec> groups{{1.0 - resp, UnitPotentials::mediated(1, 1, 0.0, tau)}};
    if (p_share > 0.0) groups.push_back({p_share, UnitPotentials::mediated(0, 1, 0.0, tau)});
    if (n_share > 0.0) groups.push_back({n_share, UnitPotentials::mediated(1, 0, 0.0, tau)});
    const BinaryPopulation with_nulls(std::move(groups));
    const auto c = classify(with_nulls);
    const double calc_null = c.omega * tau * (c.p_frac + c.n_frac);
    nulls.max_deviation = std::max(
        nulls.max_deviation,
        std::abs(null_inclusion_bias(with_nulls) - (true_pate(with_nulls) - calc_null)));
    ++nulls.cases;
  }
  return {case2, case1, case1_pop, hetero, nulls};
}

inline int cmd_oracle_check(const OracleCheckArgs& a, const CLI::App& sub, std::ostream& out) {
  const auto seed = sub.count("--seed") ? a.seed : default_seed();
  if (a.sweeps == 0) throw usage_error("--sweeps must be positive");

  if (!a.dump_world.empty() || !a.dump_joint.empty()) {
    std::mt19937_64 rng(seed);
    const auto w = random_world(rng, {4, !a.negate_condition1});
    if (!a.dump_world.empty()) std::ofstream(a.dump_world) << to_json(w).dump(2) << '\n';
    if (!a.dump_joint.empty()) std::ofstream(a.dump_joint) << to_json(world_to_joint(w)).dump(2) << '\n';
  }

  if (!a.world.empty()) {
    std::ifstream in(a.world);
    if (!in) throw data_error("cannot open '" + a.world + "'");
    const auto w = world_from_json(parse_document(in));
    const auto joint = world_to_joint(w);
    const bool intercepts = w.mediator_intercepts_all_paths();
    out << "mediator intercepts all X -> Y paths: " << (intercepts ? "yes" : "no") << '\n';
    double worst = 0.0;
    for (std::size_t x = 0; x < w.nx(); ++x) {
      const auto fd = front_door_adjust(joint, x);
      const auto truth = interventional_oracle(w, x);
      for (std::size_t y = 0; y < w.ny(); ++y)
        out << "P(y=" << w.supports().y[y] << " | do(x=" << w.supports().x[x]
            << ")): front-door " << format_full(fd[y]) << ", oracle " << format_full(truth[y])
            << '\n';
      worst = std::max(worst, max_abs_diff(fd, truth));
    }
    out << "max |front-door - oracle| = " << format_full(worst) << '\n';
    if (intercepts && worst > 1e-10) return kOracleFailure;
    return kSuccess;
  }

  bool ok = true;
  auto report = [&out](const SuiteResult& s, const char* verdict) {
    out << s.name << ": cases=" << s.cases << " max_dev=" << format_full(s.max_deviation)
        << " tol=" << format_full(s.tolerance) << ' ' << verdict << '\n';
  };

  const auto fd = frontdoor_suites(a.sweeps, seed, !a.negate_condition1);
  if (a.negate_condition1) {
    // Worlds with a direct X -> Y mechanism: the front-door formula must disagree.
    const auto& match = fd[0];
    const bool detected = !match.passed();
    report(match, detected ? "EXPECTED FAILURE (X -> Y bypasses M)" : "UNEXPECTED PASS");
    ok = ok && detected;
    for (std::size_t i = 1; i < fd.size(); ++i) {
      report(fd[i], fd[i].passed() ? "PASS" : "FAIL");
      ok = ok && fd[i].passed();
    }
  } else {
    for (const auto& s : fd) {
      report(s, s.passed() ? "PASS" : "FAIL");
      ok = ok && s.passed();
    }
  }
  for (const auto& s : bias_suites(10 * a.sweeps, seed)) {
    report(s, s.passed() ? "PASS" : "FAIL");
    ok = ok && s.passed();
  }
  out << (ok ? "oracle-check: all suites passed" : "oracle-check: FAILED") << '\n';
  return ok ? kSuccess : kOracleFailure;
}

// ---------------------------------------------------------------- entry point

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Front-door criterion estimation laboratory", "fdlab"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a seeded DAG 1-4 dataset");
  s->add_option("--dag", sim.dag, "Scenario DAG (1-4)")->check(CLI::Range(1, 4));
  s->add_option("--n", sim.n, "Number of units")->check(CLI::Range(std::size_t{10}, std::size_t{1} << 40));
  s->add_option("--seed", sim.seed, std::string("Seed (default: $") + kSeedEnv + " or 42)");
  s->add_option("--out", sim.out, "Observed-data CSV path")->required();
  s->add_option("--truth", sim.truth, "Truth sidecar CSV path (C, group)");
  s->add_option("--config", sim.config, "Scenario JSON document");
  s->add_option("--set", sim.set, "Coefficient override key=value (repeatable)");
  s->add_flag("--combined", sim.combined, "Write C and group into the observed CSV");

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Two-step front-door estimate from a CSV");
  e->add_option("--input", est.input, "CSV with a header row")->required();
  e->add_option("--treatment", est.treatment, "Treatment column");
  e->add_option("--mediator", est.mediator, "Mediator column");
  e->add_option("--outcome", est.outcome, "Outcome column");
  e->add_option("--instrument", est.instrument, "Instrument column (adds a 2SLS block)");
  e->add_option("--format", est.format, "human|csv|json|markdown")
      ->check(CLI::IsMember({"human", "csv", "json", "markdown"}));

  Table1Args t1;
  auto* t = app.add_subcommand("table1", "Run all four DAGs and print the estimate table");
  t->add_option("--n", t1.n, "Units per DAG");
  t->add_option("--seed", t1.seed, "Seed shared by the four DAGs");
  t->add_option("--format", t1.format, "human|csv|json|markdown")
      ->check(CLI::IsMember({"human", "csv", "json", "markdown"}));

  BiasAuditArgs ba;
  auto* b = app.add_subcommand("bias-audit", "Exact effects and bias terms for a population document");
  b->add_option("--input", ba.input, "population or mixed_path JSON document")->required();
  b->add_option("--format", ba.format, "human|csv|json|markdown")
      ->check(CLI::IsMember({"human", "csv", "json", "markdown"}));

  OracleCheckArgs oc;
  auto* o = app.add_subcommand("oracle-check", "Randomized oracle-equivalence suites");
  o->add_option("--sweeps", oc.sweeps, "Random worlds (bias suites use 10x draws)");
  o->add_option("--seed", oc.seed, "Seed for the random sweeps");
  o->add_flag("--negate-condition1", oc.negate_condition1,
              "Inject a direct X -> Y mechanism; the front-door check must fail");
  o->add_option("--world", oc.world, "Check one world JSON document instead of sweeping");
  o->add_option("--dump-world", oc.dump_world, "Write a random world document");
  o->add_option("--dump-joint", oc.dump_joint, "Write that world's joint table document");

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& ex) {
    err << "usage error: " << ex.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (*s) return cmd_simulate(sim, *s, out);
    if (*e) return cmd_estimate(est, out);
    if (*t) return cmd_table1(t1, *t, out);
    if (*b) return cmd_bias_audit(ba, out);
    if (*o) return cmd_oracle_check(oc, *o, out);
  } catch (const usage_error& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kUsageError;
  } catch (const precondition_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kDataError;
  } catch (const data_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

inline int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args), out, err);
}

}  // namespace fdlab::cli
