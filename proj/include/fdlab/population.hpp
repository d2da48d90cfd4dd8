#pragma once

// Potential-outcome types for binary treatment / binary mediator worlds and
// exact effect definitions evaluated by enumerating subgroups.

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fdlab/error.hpp"

namespace fdlab {

enum class PathTag { mediated, direct };

inline const char* to_string(PathTag tag) {
  return tag == PathTag::mediated ? "mediated" : "direct";
}

// One unit's potential-outcome schedule.
//
// For a mediated unit y_low/y_high are Y(m=0)/Y(m=1); for a direct unit they
// are Y(x=0)/Y(x=1). The mediator response (M(0), M(1)) is kept in both cases.
class UnitPotentials {
 public:
  static UnitPotentials mediated(int m0, int m1, double y_m0, double y_m1) {
    return UnitPotentials(PathTag::mediated, m0, m1, y_m0, y_m1);
  }
  static UnitPotentials direct(int m0, int m1, double y_x0, double y_x1) {
    return UnitPotentials(PathTag::direct, m0, m1, y_x0, y_x1);
  }

  PathTag path() const { return path_; }
  int m0() const { return m0_; }
  int m1() const { return m1_; }
  double y_low() const { return y_low_; }
  double y_high() const { return y_high_; }

  int mediator_response() const { return m1_ - m0_; }
  double y_difference() const { return y_high_ - y_low_; }

 private:
  UnitPotentials(PathTag path, int m0, int m1, double y_low, double y_high)
      : path_(path), m0_(m0), m1_(m1), y_low_(y_low), y_high_(y_high) {
    if ((m0 != 0 && m0 != 1) || (m1 != 0 && m1 != 1))
      throw precondition_error("mediator potential outcomes must be 0 or 1");
  }

  PathTag path_;
  int m0_;
  int m1_;
  double y_low_;
  double y_high_;
};

struct SubgroupSpec {
  double proportion;
  UnitPotentials unit;
};

inline constexpr double kProportionTolerance = 1e-12;

// Finite mixture of homogeneous subgroups; proportions sum to one.
class BinaryPopulation {
 public:
  explicit BinaryPopulation(std::vector<SubgroupSpec> subgroups)
      : subgroups_(std::move(subgroups)) {
    if (subgroups_.empty())
      throw precondition_error("population must contain at least one subgroup");
    double total = 0.0;
    for (const auto& g : subgroups_) {
      if (!(g.proportion > 0.0) || g.proportion > 1.0)
        throw precondition_error("subgroup proportion must lie in (0, 1]");
      total += g.proportion;
    }
    if (std::abs(total - 1.0) > kProportionTolerance)
      throw precondition_error("subgroup proportions sum to " + std::to_string(total) +
                               ", expected 1");
  }

  const std::vector<SubgroupSpec>& subgroups() const { return subgroups_; }

  bool all_mediated() const {
    for (const auto& g : subgroups_)
      if (g.unit.path() != PathTag::mediated) return false;
    return true;
  }

 private:
  std::vector<SubgroupSpec> subgroups_;
};

namespace detail {
inline void require_mediated(const BinaryPopulation& pop, const char* op) {
  if (!pop.all_mediated())
    throw precondition_error(std::string(op) +
                             " requires every subgroup to follow the mediated path");
}
}  // namespace detail

// Path-specific individual effect (Y(1) - Y(0)) * (M(1) - M(0)) along X -> M -> Y.
inline double pite(const UnitPotentials& unit) {
  if (unit.path() != PathTag::mediated)
    throw precondition_error("pite is defined only for mediated units");
  return unit.y_difference() * static_cast<double>(unit.mediator_response());
}

struct Classification {
  double p_frac = 0.0;
  double n_frac = 0.0;
  double null_frac = 0.0;
  double omega = 0.0;
};

inline Classification classify(const BinaryPopulation& pop) {
  detail::require_mediated(pop, "classify");
  Classification c;
  for (const auto& g : pop.subgroups()) {
    switch (g.unit.mediator_response()) {
      case 1: c.p_frac += g.proportion; break;
      case -1: c.n_frac += g.proportion; break;
      default: c.null_frac += g.proportion; break;
    }
  }
  c.omega = c.p_frac - c.n_frac;
  return c;
}

inline double true_pate(const BinaryPopulation& pop) {
  detail::require_mediated(pop, "true_pate");
  double total = 0.0;
  for (const auto& g : pop.subgroups()) total += g.proportion * pite(g.unit);
  return total;
}

// End-to-end X -> Y effect: PITE for mediated units, Y(x=1) - Y(x=0) for direct units.
inline double true_ate(const BinaryPopulation& pop) {
  double total = 0.0;
  for (const auto& g : pop.subgroups()) {
    const double effect = g.unit.path() == PathTag::mediated ? pite(g.unit)
                                                             : g.unit.y_difference();
    total += g.proportion * effect;
  }
  return total;
}

// PATE over units whose mediator responds to treatment, proportions renormalized.
inline double true_late(const BinaryPopulation& pop) {
  detail::require_mediated(pop, "true_late");
  double responsive = 0.0;
  double weighted = 0.0;
  for (const auto& g : pop.subgroups()) {
    if (g.unit.mediator_response() == 0) continue;
    responsive += g.proportion;
    weighted += g.proportion * pite(g.unit);
  }
  if (!(responsive > 0.0))
    throw precondition_error("true_late: no unit has M(1) != M(0)");
  return weighted / responsive;
}

}  // namespace fdlab
