#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "fdlab/error.hpp"

namespace fdlab {

// Shortest round-trip decimal representation, independent of the C locale.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw data_error("not a number: '" + std::string(text) + "'");
  return v;
}

// Named numeric columns of equal length.
class Dataset {
 public:
  Dataset() = default;

  void add_column(std::string name, std::vector<double> values) {
    if (has(name)) throw data_error("duplicate column '" + name + "'");
    if (!columns_.empty() && values.size() != rows())
      throw data_error("column '" + name + "' has " + std::to_string(values.size()) +
                       " rows, expected " + std::to_string(rows()));
    names_.push_back(std::move(name));
    columns_.push_back(std::move(values));
  }

  bool has(std::string_view name) const { return index_of(name) != npos; }

  const std::vector<double>& column(std::string_view name) const {
    const auto i = index_of(name);
    if (i == npos) throw data_error("missing column '" + std::string(name) + "'");
    return columns_[i];
  }

  const std::vector<std::string>& names() const { return names_; }
  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t cols() const { return columns_.size(); }

  void write_csv(std::ostream& out) const {
    for (std::size_t j = 0; j < names_.size(); ++j) out << (j ? "," : "") << names_[j];
    out << '\n';
    for (std::size_t i = 0; i < rows(); ++i) {
      for (std::size_t j = 0; j < columns_.size(); ++j)
        out << (j ? "," : "") << format_double(columns_[j][i]);
      out << '\n';
    }
  }

  // Comma separated, mandatory header row, '.' decimal point.
  static Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw data_error("CSV input is empty (header row required)");
    const auto header = split(line);
    std::vector<std::vector<double>> cols(header.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      const auto fields = split(line);
      if (fields.size() != header.size())
        throw data_error("CSV line " + std::to_string(line_no) + ": expected " +
                         std::to_string(header.size()) + " fields, got " +
                         std::to_string(fields.size()));
      for (std::size_t j = 0; j < fields.size(); ++j) {
        try {
          cols[j].push_back(parse_double(fields[j]));
        } catch (const data_error& e) {
          throw data_error("CSV line " + std::to_string(line_no) + ", column '" + header[j] +
                           "': " + e.what());
        }
      }
    }
    Dataset d;
    for (std::size_t j = 0; j < header.size(); ++j) d.add_column(header[j], std::move(cols[j]));
    return d;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == name) return i;
    return npos;
  }

  static std::vector<std::string> split(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      auto field = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      if (field.size() >= 2 && field.front() == '"' && field.back() == '"')
        field = field.substr(1, field.size() - 2);
      out.emplace_back(field);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

}  // namespace fdlab
