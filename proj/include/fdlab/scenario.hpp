#pragma once

// Seeded linear data-generating processes for the four-DAG study.
//
//   C ~ N(0, c_sd^2)                        mean-zero normal confounder
//   X = x_intercept + x_on_c C + N(0, x_noise_sd^2) [+ instrument Z]
//   DAG 1/2: M = m_intercept + beta_i X + N(0, m_noise_sd^2)
//            Y = y_intercept + delta M + direct X + y_on_c C + N(0, y_noise_sd^2)
//   DAG 3/4: round(p_i n) rows form group i, the rest group j (shuffled):
//            M = m_intercept + beta X, beta = beta_i in i, beta_j in j
//            Y = y_intercept + delta M  + y_on_c C + noise    (group i)
//            Y = y_intercept + direct X + y_on_c C + noise    (group j)
//   DAG 3 forces beta_j = beta_i; DAG 4 uses its own beta_j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fdlab/bias_theory.hpp"
#include "fdlab/dataset.hpp"
#include "fdlab/error.hpp"
#include "fdlab/ols.hpp"
#include "fdlab/rng.hpp"

namespace fdlab {

struct ScenarioCoefficients {
  double c_sd = 2.0;
  double x_intercept = 60.0;
  double x_on_c = 1.0;
  double x_noise_sd = 60.0;
  double instrument = 0.0;  // loading of Z on X; 0 means no instrument column
  double m_intercept = 4.5;
  double beta_i = 1.7;
  std::optional<double> beta_j;  // DAG 4 only
  double m_noise_sd = 2.5;
  double y_intercept = 7.0;
  double delta = 0.35;
  double direct = 0.0;
  double y_on_c = 1.2;
  double y_noise_sd = 1.0;
  double p_i = 1.0;
};

inline ScenarioCoefficients default_coefficients(int dag) {
  ScenarioCoefficients c;
  switch (dag) {
    case 1:
      break;
    case 2:
      c.y_intercept = 8.0;
      c.direct = 2.3;
      break;
    case 3:
    case 4:
      c.m_intercept = 5.0;
      c.m_noise_sd = 0.0;
      c.direct = 2.3;
      c.p_i = 0.75;
      if (dag == 4) c.beta_j = 5.7;
      break;
    default:
      throw precondition_error("dag must be 1, 2, 3 or 4 (got " + std::to_string(dag) + ")");
  }
  return c;
}

inline const std::vector<std::string>& coefficient_keys() {
  static const std::vector<std::string> keys{
      "c_sd",   "x_intercept", "x_on_c",      "x_noise_sd", "instrument",
      "m_intercept", "beta_i", "beta_j",      "m_noise_sd", "y_intercept",
      "delta",  "direct",      "y_on_c",      "y_noise_sd", "p_i"};
  return keys;
}

inline void set_coefficient(ScenarioCoefficients& c, const std::string& key, double value) {
  if (key == "c_sd") c.c_sd = value;
  else if (key == "x_intercept") c.x_intercept = value;
  else if (key == "x_on_c") c.x_on_c = value;
  else if (key == "x_noise_sd") c.x_noise_sd = value;
  else if (key == "instrument") c.instrument = value;
  else if (key == "m_intercept") c.m_intercept = value;
  else if (key == "beta_i") c.beta_i = value;
  else if (key == "beta_j") c.beta_j = value;
  else if (key == "m_noise_sd") c.m_noise_sd = value;
  else if (key == "y_intercept") c.y_intercept = value;
  else if (key == "delta") c.delta = value;
  else if (key == "direct") c.direct = value;
  else if (key == "y_on_c") c.y_on_c = value;
  else if (key == "y_noise_sd") c.y_noise_sd = value;
  else if (key == "p_i") c.p_i = value;
  else throw precondition_error("unknown coefficient override '" + key + "'");
}

struct ScenarioConfig {
  int dag = 1;
  std::size_t n = 200;
  std::uint64_t seed = 42;
  std::map<std::string, double> overrides;

  ScenarioCoefficients coefficients() const {
    auto c = default_coefficients(dag);
    for (const auto& [k, v] : overrides) set_coefficient(c, k, v);
    return c;
  }

  bool grouped() const { return dag == 3 || dag == 4; }

  void validate() const {
    const auto c = coefficients();
    if (n < 10) throw precondition_error("n must be at least 10");
    if (c.c_sd < 0 || c.x_noise_sd < 0 || c.m_noise_sd < 0 || c.y_noise_sd < 0)
      throw precondition_error("noise scales must be non-negative");
    if (grouped()) {
      if (!(c.p_i > 0.0 && c.p_i < 1.0))
        throw precondition_error("p_i must lie in (0, 1) for DAG 3 and 4");
      const auto ni = mediated_count();
      if (ni == 0 || ni == n) throw precondition_error("both groups need at least one row");
    } else if (c.p_i != 1.0) {
      throw precondition_error("p_i applies only to DAG 3 and 4");
    }
  }

  std::size_t mediated_count() const {
    if (!grouped()) return n;
    return static_cast<std::size_t>(std::llround(coefficients().p_i * static_cast<double>(n)));
  }
};

inline double group_beta_j(const ScenarioConfig& cfg, const ScenarioCoefficients& c) {
  return cfg.dag == 4 ? c.beta_j.value_or(c.beta_i) : c.beta_i;
}

struct TrueEffects {
  double ate;
  double pate;
};

inline TrueEffects true_effects(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto c = cfg.coefficients();
  const double chain = c.beta_i * c.delta;
  if (!cfg.grouped()) return {chain + c.direct, chain};
  const double pate = chain * c.p_i;
  return {pate + c.direct * (1.0 - c.p_i), pate};
}

// Mixed-path parameters of a DAG 3/4 scenario, with the slopes as E[M(1) - M(0)].
inline MixedPathParams scenario_mixed_params(const ScenarioConfig& cfg) {
  if (!cfg.grouped()) throw precondition_error("mixed-path parameters exist only for DAG 3 and 4");
  cfg.validate();
  const auto c = cfg.coefficients();
  return {c.p_i, 1.0 - c.p_i, c.delta, c.direct, c.beta_i, group_beta_j(cfg, c)};
}

struct SimOutput {
  Dataset observed;                // X, M, Y (and Z when an instrument is configured)
  std::vector<double> confounder;  // C
  std::vector<int> group;          // 0 = mediated population i, 1 = direct population j
  TrueEffects truth{};

  Dataset truth_table() const {
    Dataset d;
    d.add_column("C", confounder);
    d.add_column("group", std::vector<double>(group.begin(), group.end()));
    return d;
  }

  Dataset combined() const {
    Dataset d;
    for (const auto& name : observed.names()) d.add_column(name, observed.column(name));
    d.add_column("C", confounder);
    d.add_column("group", std::vector<double>(group.begin(), group.end()));
    return d;
  }
};

inline SimOutput simulate(const ScenarioConfig& cfg) {
  cfg.validate();
  const auto c = cfg.coefficients();
  const std::size_t n = cfg.n;
  Rng rng(cfg.seed);

  std::vector<int> group(n, 0);
  if (cfg.grouped()) {
    const std::size_t ni = cfg.mediated_count();
    std::fill(group.begin() + static_cast<std::ptrdiff_t>(ni), group.end(), 1);
    for (std::size_t i = n - 1; i > 0; --i) std::swap(group[i], group[rng.below(i + 1)]);
  }
  const double beta_j = group_beta_j(cfg, c);
  const bool with_instrument = c.instrument != 0.0;

  std::vector<double> cc(n), z, x(n), m(n), y(n);
  if (with_instrument) z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    cc[i] = rng.normal(0.0, c.c_sd);
    x[i] = c.x_intercept + c.x_on_c * cc[i] + rng.normal(0.0, c.x_noise_sd);
    if (with_instrument) {
      z[i] = rng.normal();
      x[i] += c.instrument * z[i];
    }
    const bool direct_group = group[i] == 1;
    const double slope = direct_group ? beta_j : c.beta_i;
    m[i] = c.m_intercept + slope * x[i];
    if (c.m_noise_sd > 0.0) m[i] += rng.normal(0.0, c.m_noise_sd);
    double path;
    if (cfg.grouped())
      path = direct_group ? c.direct * x[i] : c.delta * m[i];
    else
      path = c.delta * m[i] + c.direct * x[i];
    y[i] = c.y_intercept + path + c.y_on_c * cc[i] + rng.normal(0.0, c.y_noise_sd);
  }

  SimOutput out;
  out.observed.add_column("X", std::move(x));
  out.observed.add_column("M", std::move(m));
  out.observed.add_column("Y", std::move(y));
  if (with_instrument) out.observed.add_column("Z", std::move(z));
  out.confounder = std::move(cc);
  out.group = std::move(group);
  out.truth = true_effects(cfg);
  return out;
}

struct StatSummary {
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double median = 0.0;
  double q975 = 0.0;
  std::size_t count = 0;  // non-NaN values summarized
};

// Linear-interpolation quantile (type 7) of sorted values.
inline double sorted_quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline StatSummary summarize(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values)
    if (!std::isnan(x)) v.push_back(x);
  StatSummary s;
  s.count = v.size();
  if (v.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan, nan, nan, nan, 0};
  }
  double total = 0.0;
  for (double x : v) total += x;
  s.mean = total / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  std::sort(v.begin(), v.end());
  s.q025 = sorted_quantile(v, 0.025);
  s.median = sorted_quantile(v, 0.5);
  s.q975 = sorted_quantile(v, 0.975);
  return s;
}

struct ReplicationRecord {
  double fdc_estimate;
  double step1_intercept;
  double step1_slope;
  double step2_intercept;
  double step2_mediator;
  double step2_treatment;    // NaN when X was dropped
  double step2_treatment_t;  // NaN when X was dropped
};

struct ReplicationSummary {
  std::size_t reps = 0;
  StatSummary fdc_estimate, step1_intercept, step1_slope, step2_intercept, step2_mediator,
      step2_treatment;
  std::vector<ReplicationRecord> runs;  // indexed by replication
};

inline ReplicationRecord replication_record(const TwoStepResult& r) {
  const auto& x2 = r.step2[r.treatment];
  return {r.fdc_estimate,
          r.step1[kInterceptName].estimate,
          r.step1_slope(),
          r.step2[kInterceptName].estimate,
          r.mediator_coefficient(),
          x2.estimate,
          x2.t_value};
}

// Monte Carlo over simulate + fdc_two_step. Replication k uses
// replication_seed(config.seed, k); results are aggregated in index order, so
// the summary does not depend on the thread count.
inline ReplicationSummary replicate(const ScenarioConfig& config, std::size_t reps,
                                    unsigned threads = 1) {
  if (reps == 0) throw precondition_error("replicate: reps must be at least 1");
  config.validate();
  std::vector<ReplicationRecord> runs(reps);
  threads = std::max(1u, threads);
  std::vector<std::exception_ptr> failures(threads);
  auto work = [&](unsigned first) {
    try {
      for (std::size_t k = first; k < reps; k += threads) {
        auto cfg = config;
        cfg.seed = replication_seed(config.seed, k);
        runs[k] = replication_record(fdc_two_step(simulate(cfg).observed));
      }
    } catch (...) {
      failures[first] = std::current_exception();
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  ReplicationSummary s;
  s.reps = reps;
  auto column = [&runs](double ReplicationRecord::*field) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.*field);
    return summarize(v);
  };
  s.fdc_estimate = column(&ReplicationRecord::fdc_estimate);
  s.step1_intercept = column(&ReplicationRecord::step1_intercept);
  s.step1_slope = column(&ReplicationRecord::step1_slope);
  s.step2_intercept = column(&ReplicationRecord::step2_intercept);
  s.step2_mediator = column(&ReplicationRecord::step2_mediator);
  s.step2_treatment = column(&ReplicationRecord::step2_treatment);
  s.runs = std::move(runs);
  return s;
}

}  // namespace fdlab
