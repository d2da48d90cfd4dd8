#pragma once

// JSON documents for populations, mixed-path parameters, structural worlds,
// joint tables and scenario configs. Every document carries a "kind" field.

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdlab/bias_theory.hpp"
#include "fdlab/discrete_frontdoor.hpp"
#include "fdlab/error.hpp"
#include "fdlab/population.hpp"
#include "fdlab/scenario.hpp"

namespace fdlab {

using json = nlohmann::json;

namespace detail {
template <class T>
T field(const json& j, const char* key) {
  if (!j.contains(key)) throw data_error(std::string("document is missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw data_error(std::string("field '") + key + "': " + e.what());
  }
}

inline std::string kind_of(const json& j) {
  if (!j.is_object()) throw data_error("document must be a JSON object");
  if (j.contains("kind")) return field<std::string>(j, "kind");
  if (j.contains("subgroups")) return "population";
  if (j.contains("p_i")) return "mixed_path";
  if (j.contains("p_y_given_xmu")) return "world";
  if (j.contains("p_xmy")) return "joint";
  throw data_error("cannot tell the document kind; add a \"kind\" field");
}
}  // namespace detail

inline json parse_document(std::istream& in) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("invalid JSON: ") + e.what());
  }
}

inline std::string document_kind(const json& j) { return detail::kind_of(j); }

inline json to_json(const BinaryPopulation& pop) {
  json groups = json::array();
  for (const auto& g : pop.subgroups())
    groups.push_back({{"proportion", g.proportion},
                      {"path", to_string(g.unit.path())},
                      {"m0", g.unit.m0()},
                      {"m1", g.unit.m1()},
                      {"y_low", g.unit.y_low()},
                      {"y_high", g.unit.y_high()}});
  return {{"kind", "population"}, {"subgroups", groups}};
}

inline BinaryPopulation population_from_json(const json& j) {
  if (detail::kind_of(j) != "population") throw data_error("expected a population document");
  const auto& arr = j.at("subgroups");
  if (!arr.is_array()) throw data_error("'subgroups' must be an array");
  std::vector<SubgroupSpec> groups;
  for (const auto& g : arr) {
    const auto path = detail::field<std::string>(g, "path");
    const int m0 = detail::field<int>(g, "m0");
    const int m1 = detail::field<int>(g, "m1");
    const double lo = detail::field<double>(g, "y_low");
    const double hi = detail::field<double>(g, "y_high");
    const double share = detail::field<double>(g, "proportion");
    if (path == "mediated")
      groups.push_back({share, UnitPotentials::mediated(m0, m1, lo, hi)});
    else if (path == "direct")
      groups.push_back({share, UnitPotentials::direct(m0, m1, lo, hi)});
    else
      throw data_error("subgroup path must be \"mediated\" or \"direct\", got \"" + path + "\"");
  }
  return BinaryPopulation(std::move(groups));
}

inline json to_json(const MixedPathParams& p) {
  return {{"kind", "mixed_path"}, {"p_i", p.p_i}, {"p_j", p.p_j}, {"c_i", p.c_i},
          {"n_j", p.n_j},        {"m_i", p.m_i}, {"m_j", p.m_j}};
}

inline MixedPathParams mixed_params_from_json(const json& j) {
  if (detail::kind_of(j) != "mixed_path") throw data_error("expected a mixed_path document");
  MixedPathParams p{detail::field<double>(j, "p_i"), detail::field<double>(j, "p_j"),
                    detail::field<double>(j, "c_i"), detail::field<double>(j, "n_j"),
                    detail::field<double>(j, "m_i"), detail::field<double>(j, "m_j")};
  p.validate();
  return p;
}

inline json to_json(const StructuralWorld& w) {
  const auto& s = w.supports();
  return {{"kind", "world"},
          {"supports", {{"u", s.u}, {"x", s.x}, {"m", s.m}, {"y", s.y}}},
          {"p_u", w.p_u()},
          {"p_x_given_u", w.p_x_given_u()},
          {"p_m_given_x", w.p_m_given_x()},
          {"p_y_given_xmu", w.p_y_given_xmu()}};
}

inline StructuralWorld world_from_json(const json& j) {
  if (detail::kind_of(j) != "world") throw data_error("expected a world document");
  const auto& sup = j.at("supports");
  StructuralWorld::Supports s{detail::field<Labels>(sup, "u"), detail::field<Labels>(sup, "x"),
                              detail::field<Labels>(sup, "m"), detail::field<Labels>(sup, "y")};
  return StructuralWorld(std::move(s), detail::field<std::vector<double>>(j, "p_u"),
                         detail::field<StructuralWorld::Table2>(j, "p_x_given_u"),
                         detail::field<StructuralWorld::Table2>(j, "p_m_given_x"),
                         detail::field<StructuralWorld::Table4>(j, "p_y_given_xmu"));
}

inline json to_json(const JointXMY& joint) {
  json cells = json::array();
  for (std::size_t x = 0; x < joint.nx(); ++x) {
    json by_m = json::array();
    for (std::size_t m = 0; m < joint.nm(); ++m) {
      json by_y = json::array();
      for (std::size_t y = 0; y < joint.ny(); ++y) by_y.push_back(joint(x, m, y));
      by_m.push_back(by_y);
    }
    cells.push_back(by_m);
  }
  return {{"kind", "joint"},
          {"supports", {{"x", joint.x_labels()}, {"m", joint.m_labels()}, {"y", joint.y_labels()}}},
          {"p_xmy", cells}};
}

inline JointXMY joint_from_json(const json& j) {
  if (detail::kind_of(j) != "joint") throw data_error("expected a joint document");
  const auto& sup = j.at("supports");
  auto xs = detail::field<Labels>(sup, "x");
  auto ms = detail::field<Labels>(sup, "m");
  auto ys = detail::field<Labels>(sup, "y");
  const auto cells = detail::field<std::vector<std::vector<std::vector<double>>>>(j, "p_xmy");
  if (cells.size() != xs.size()) throw data_error("p_xmy: x dimension does not match supports");
  std::vector<double> flat;
  for (const auto& by_m : cells) {
    if (by_m.size() != ms.size()) throw data_error("p_xmy: m dimension does not match supports");
    for (const auto& by_y : by_m) {
      if (by_y.size() != ys.size()) throw data_error("p_xmy: y dimension does not match supports");
      flat.insert(flat.end(), by_y.begin(), by_y.end());
    }
  }
  return JointXMY(std::move(xs), std::move(ms), std::move(ys), std::move(flat));
}

// {"kind": "scenario", "dag": 1, "n": 200, "seed": 42, "overrides": {"delta": 0.4}}
inline ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  if (j.contains("dag")) cfg.dag = detail::field<int>(j, "dag");
  if (j.contains("n")) cfg.n = detail::field<std::size_t>(j, "n");
  if (j.contains("seed")) cfg.seed = detail::field<std::uint64_t>(j, "seed");
  if (j.contains("overrides"))
    cfg.overrides = detail::field<std::map<std::string, double>>(j, "overrides");
  return cfg;
}

inline json to_json(const ScenarioConfig& cfg) {
  return {{"kind", "scenario"}, {"dag", cfg.dag}, {"n", cfg.n}, {"seed", cfg.seed},
          {"overrides", cfg.overrides}};
}

}  // namespace fdlab
