#pragma once

// Closed-form bias expressions for the front-door estimator when its
// homogeneity, null-mediator, uniqueness and universality assumptions fail.
// All biases are reported as (true value) - (calculated value).

#include <cmath>
#include <vector>

#include "fdlab/error.hpp"
#include "fdlab/population.hpp"

namespace fdlab {

inline constexpr double kAlgebraTolerance = 1e-12;

// Two-population mix: population i follows X -> M -> Y, population j has a
// direct X -> Y effect.
struct MixedPathParams {
  double p_i;  // share of mediated population i
  double p_j;  // share of direct population j
  double c_i;  // E[C_i], per-unit M -> Y effect in i
  double n_j;  // E[N_j], per-unit X -> Y effect in j
  double m_i;  // E[M_i(1) - M_i(0)]
  double m_j;  // E[M_j(1) - M_j(0)]

  void validate() const {
    if (!(p_i >= 0.0) || !(p_j >= 0.0))
      throw precondition_error("mixed-path shares must be non-negative");
    if (std::abs(p_i + p_j - 1.0) > kProportionTolerance)
      throw precondition_error("mixed-path shares must sum to 1");
    if (m_j == 0.0 || !std::isfinite(m_j))
      throw precondition_error("E[M_j(1) - M_j(0)] must be finite and non-zero");
  }
};

struct HeterogeneityBias {
  double bias;
  double omega;
};

namespace detail {
struct ResponsiveSummary {
  double p_share = 0.0, n_share = 0.0, null_share = 0.0;
  double p_effect = 0.0, n_effect = 0.0;  // E[Y(1) - Y(0)] within p and n units
};

inline ResponsiveSummary summarize_responsive(const BinaryPopulation& pop) {
  ResponsiveSummary s;
  for (const auto& g : pop.subgroups()) {
    const double d = g.unit.y_difference();
    switch (g.unit.mediator_response()) {
      case 1: s.p_share += g.proportion; s.p_effect += g.proportion * d; break;
      case -1: s.n_share += g.proportion; s.n_effect += g.proportion * d; break;
      default: s.null_share += g.proportion; break;
    }
  }
  if (s.p_share > 0.0) s.p_effect /= s.p_share;
  if (s.n_share > 0.0) s.n_effect /= s.n_share;
  return s;
}
}  // namespace detail

// Bias from heterogeneous Y-effects between p and n units:
// Ep P(p) (1 - omega) - En P(n) (1 + omega).
inline HeterogeneityBias heterogeneity_bias(const BinaryPopulation& pop) {
  detail::require_mediated(pop, "heterogeneity_bias");
  const auto s = detail::summarize_responsive(pop);
  if (s.null_share > 0.0)
    throw precondition_error(
        "heterogeneity_bias: population has units with M(1) = M(0); use null_inclusion_bias");
  const double omega = s.p_share - s.n_share;
  const double bias =
      s.p_effect * s.p_share * (1.0 - omega) - s.n_effect * s.n_share * (1.0 + omega);
  return {bias, omega};
}

// Bias from keeping units with M(1) = M(0) when p and n share one effect tau.
// Null units add nothing to E[Y(1) - Y(0)], so the bias is tau * omega * P(null).
inline double null_inclusion_bias(const BinaryPopulation& pop) {
  detail::require_mediated(pop, "null_inclusion_bias");
  const auto s = detail::summarize_responsive(pop);
  double tau = 0.0;
  bool seen = false;
  for (const auto& g : pop.subgroups()) {
    if (g.unit.mediator_response() == 0) continue;
    const double d = g.unit.y_difference();
    if (!seen) {
      tau = d;
      seen = true;
    } else if (std::abs(d - tau) > kAlgebraTolerance) {
      throw precondition_error(
          "null_inclusion_bias: responsive units have heterogeneous effects; use "
          "heterogeneity_bias");
    }
  }
  const double omega = s.p_share - s.n_share;
  return tau * omega * (1.0 - s.p_share - s.n_share);
}

// Gap between the full ATE and the path-specific effect; the front-door
// estimator cannot see it, so ate_full must come from ground truth.
inline double other_path_gap(double ate_full, double pate) { return ate_full - pate; }

// True ATE of a mixed population: E[C_i] P(i) E[M_i diff] + E[N_j] P(j).
inline double mixed_true_ate(const MixedPathParams& p) {
  p.validate();
  return p.c_i * p.p_i * p.m_i + p.n_j * p.p_j;
}

inline double pooled_mediator_effect(const MixedPathParams& p) {
  return p.c_i * p.p_i + (p.n_j / p.m_j) * p.p_j;
}

// Same X -> M function in both populations (m_i = m_j).
inline double case1_ate_cal(const MixedPathParams& p) {
  p.validate();
  if (std::abs(p.m_i - p.m_j) > kAlgebraTolerance)
    throw precondition_error("case1_ate_cal: m_i != m_j (different X -> M functions, Case 2)");
  return pooled_mediator_effect(p) * p.m_i;
}

// Expanded Case 1 form: E[C_i] P(i) E[M_i diff] + E[N_j] P(j).
inline double case1_ate_cal_expanded(const MixedPathParams& p) {
  p.validate();
  if (std::abs(p.m_i - p.m_j) > kAlgebraTolerance)
    throw precondition_error("case1_ate_cal_expanded: m_i != m_j");
  return p.c_i * p.p_i * p.m_i + p.n_j * p.p_j;
}

// Pooled product when the two populations have different X -> M functions.
inline double case2_ate_cal(const MixedPathParams& p) {
  p.validate();
  return pooled_mediator_effect(p) * (p.m_i * p.p_i + p.m_j * p.p_j);
}

struct Case2Bias {
  double gamma;
  double epsilon;
};

inline Case2Bias case2_bias(const MixedPathParams& p) {
  p.validate();
  const double gamma = p.p_i * p.p_j * (p.m_i - p.m_j);
  return {gamma, gamma * (p.c_i - p.n_j / p.m_j)};
}

// Binary population realizing the parameters: population i split into p/n
// units so that P(p) - P(n) = m_i, every unit with M -> Y effect c_i;
// population j likewise with direct effect n_j. Needs |m_i|, |m_j| <= 1.
inline BinaryPopulation to_population(const MixedPathParams& p) {
  p.validate();
  if (std::abs(p.m_i) > 1.0 || std::abs(p.m_j) > 1.0)
    throw precondition_error("to_population: mediator responses must lie in [-1, 1]");
  std::vector<SubgroupSpec> groups;
  auto add = [&groups](double share, UnitPotentials unit) {
    if (share > 0.0) groups.push_back({share, unit});
  };
  add(p.p_i * 0.5 * (1.0 + p.m_i), UnitPotentials::mediated(0, 1, 0.0, p.c_i));
  add(p.p_i * 0.5 * (1.0 - p.m_i), UnitPotentials::mediated(1, 0, 0.0, p.c_i));
  add(p.p_j * 0.5 * (1.0 + p.m_j), UnitPotentials::direct(0, 1, 0.0, p.n_j));
  add(p.p_j * 0.5 * (1.0 - p.m_j), UnitPotentials::direct(1, 0, 0.0, p.n_j));
  return BinaryPopulation(std::move(groups));
}

// Reads the mixed-path summary off a population with both mediated and direct units.
inline MixedPathParams mixed_params_from_population(const BinaryPopulation& pop) {
  MixedPathParams out{0, 0, 0, 0, 0, 0};
  for (const auto& g : pop.subgroups()) {
    const double w = g.proportion;
    if (g.unit.path() == PathTag::mediated) {
      out.p_i += w;
      out.c_i += w * g.unit.y_difference();
      out.m_i += w * g.unit.mediator_response();
    } else {
      out.p_j += w;
      out.n_j += w * g.unit.y_difference();
      out.m_j += w * g.unit.mediator_response();
    }
  }
  if (!(out.p_i > 0.0) || !(out.p_j > 0.0))
    throw precondition_error("population needs both mediated and direct units");
  out.c_i /= out.p_i;
  out.m_i /= out.p_i;
  out.n_j /= out.p_j;
  out.m_j /= out.p_j;
  return out;
}

}  // namespace fdlab
