#pragma once

// Table-I-style reports: estimator rows plus a truth/bias block, rendered as
// a human table (4 decimals) or as csv / json / markdown at full precision.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fdlab/dataset.hpp"
#include "fdlab/error.hpp"
#include "fdlab/ols.hpp"

namespace fdlab {

struct ReportRow {
  std::string scenario;
  std::string step;
  std::string coefficient;
  double estimate;
  double std_error;
  double t_value;
  double p_value;
  bool dropped;
};

struct TruthEntry {
  std::string scenario;
  std::string quantity;
  double value;
};

struct ReportTable {
  std::vector<ReportRow> rows;
  std::vector<TruthEntry> truth;
  std::vector<std::string> notes;

  void add_fit(const std::string& scenario, const std::string& step, const FitResult& fit) {
    for (const auto& c : fit.coefficients)
      rows.push_back({scenario, step, c.name, c.estimate, c.std_error, c.t_value, c.p_value,
                      c.dropped});
  }

  void add_truth(const std::string& scenario, const std::string& quantity, double value) {
    truth.push_back({scenario, quantity, value});
  }
};

enum class ReportFormat { human, csv, json, markdown };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "human") return ReportFormat::human;
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  if (s == "markdown") return ReportFormat::markdown;
  throw precondition_error("unknown format '" + s + "'");
}

// Four decimals; scientific notation once fixed point would be unreadable.
inline std::string format_human(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  if (v == 0.0) v = 0.0;  // no "-0.0000"
  char buf[64];
  const double a = std::abs(v);
  if (a != 0.0 && (a >= 1e7 || a < 1e-4))
    std::snprintf(buf, sizeof(buf), "%.4E", v);
  else
    std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string format_full(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return format_double(v);
}

namespace detail {
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  return v;
}

inline std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}
}  // namespace detail

inline nlohmann::json to_json(const ReportTable& t) {
  using nlohmann::json;
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"scenario", r.scenario},
                    {"step", r.step},
                    {"coefficient", r.coefficient},
                    {"estimate", detail::json_number(r.estimate)},
                    {"std_error", detail::json_number(r.std_error)},
                    {"t_value", detail::json_number(r.t_value)},
                    {"p_value", detail::json_number(r.p_value)},
                    {"dropped", r.dropped}});
  json truth = json::array();
  for (const auto& e : t.truth)
    truth.push_back({{"scenario", e.scenario},
                     {"quantity", e.quantity},
                     {"value", detail::json_number(e.value)}});
  return {{"rows", rows}, {"truth", truth}, {"notes", t.notes}};
}

inline void render(const ReportTable& t, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::json:
      out << to_json(t).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
      return;
    case ReportFormat::csv:
      out << "scenario,step,coefficient,estimate,std_error,t_value,p_value,dropped\n";
      for (const auto& r : t.rows)
        out << r.scenario << ',' << r.step << ',' << r.coefficient << ','
            << format_full(r.estimate) << ',' << format_full(r.std_error) << ','
            << format_full(r.t_value) << ',' << format_full(r.p_value) << ','
            << (r.dropped ? "true" : "false") << '\n';
      out << "\nscenario,quantity,value\n";
      for (const auto& e : t.truth)
        out << e.scenario << ',' << e.quantity << ',' << format_full(e.value) << '\n';
      return;
    case ReportFormat::markdown:
      if (!t.rows.empty()) {
        out << "| Scenario | Step | Coefficient | Estimate | Std.Error | t value | Pr(>|t|) |\n"
            << "|---|---|---|---:|---:|---:|---:|\n";
        for (const auto& r : t.rows) {
          out << "| " << r.scenario << " | " << r.step << " | " << r.coefficient << " | ";
          if (r.dropped)
            out << "dropped (collinear) | | | |\n";
          else
            out << format_human(r.estimate) << " | " << format_human(r.std_error) << " | "
                << format_human(r.t_value) << " | " << format_human(r.p_value) << " |\n";
        }
        out << '\n';
      }
      if (!t.truth.empty()) {
        out << "| Scenario | Quantity | Value |\n|---|---|---:|\n";
        for (const auto& e : t.truth)
          out << "| " << e.scenario << " | " << e.quantity << " | " << format_human(e.value)
              << " |\n";
      }
      for (const auto& n : t.notes) out << "\n> " << n << '\n';
      return;
    case ReportFormat::human:
      break;
  }

  if (!t.rows.empty()) {
    out << detail::pad("Scenario", 12, true) << detail::pad("Step", 8, true)
        << detail::pad("Coefficient", 13, true) << detail::pad("Estimate", 13)
        << detail::pad("Std.Error", 13) << detail::pad("t value", 13)
        << detail::pad("Pr(>|t|)", 13) << '\n';
    std::string last_scenario, last_step;
    for (const auto& r : t.rows) {
      const bool new_scenario = r.scenario != last_scenario;
      out << detail::pad(new_scenario ? r.scenario : "", 12, true)
          << detail::pad(new_scenario || r.step != last_step ? r.step : "", 8, true)
          << detail::pad(r.coefficient, 13, true);
      if (r.dropped)
        out << "  dropped (collinear with an earlier regressor)";
      else
        out << detail::pad(format_human(r.estimate), 13) << detail::pad(format_human(r.std_error), 13)
            << detail::pad(format_human(r.t_value), 13) << detail::pad(format_human(r.p_value), 13);
      out << '\n';
      last_scenario = r.scenario;
      last_step = r.step;
    }
  }
  if (!t.truth.empty()) {
    if (!t.rows.empty()) out << '\n';
    for (const auto& e : t.truth)
      out << detail::pad(e.scenario, 12, true) << detail::pad(e.quantity, 28, true)
          << detail::pad(format_human(e.value), 13) << '\n';
  }
  for (const auto& n : t.notes) out << "note: " << n << '\n';
}

}  // namespace fdlab
