#pragma once

#include <json.hpp>

#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "servicerule/scalar.hpp"

namespace servicerule::cli {

/// One output value. Rationals go to JSON as "a/b" and to CSV as decimals
/// rounded half-to-even to `places`.
struct Cell {
  std::variant<std::string, Rational, double, long long> value;
  int places = 3;

  static Cell text(std::string s) { return {std::move(s), 0}; }
  static Cell integer(long long v) { return {v, 0}; }
  static Cell number(Rational v, int places = 3) { return {std::move(v), places}; }
  static Cell number(double v, int places = 3) { return {v, places}; }
};

using Row = std::vector<std::pair<std::string, Cell>>;

struct Report {
  std::string command;
  std::vector<Row> rows;
};

inline std::string csv_field(const Cell& cell) {
  return std::visit(
      [&](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::string>) {
          if (v.find_first_of(",\"\n") == std::string::npos) return v;
          std::string quoted = "\"";
          for (char c : v) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
          return quoted + "\"";
        } else if constexpr (std::is_same_v<V, long long>) {
          return std::to_string(v);
        } else {
          return to_fixed(v, cell.places);
        }
      },
      cell.value);
}

inline nlohmann::ordered_json json_field(const Cell& cell) {
  return std::visit(
      [](const auto& v) -> nlohmann::ordered_json {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Rational>) {
          return to_fraction_string(v);
        } else {
          return v;
        }
      },
      cell.value);
}

/// Header row then one line per row; UTF-8, LF line endings.
inline void write_csv(std::ostream& out, const Report& report) {
  if (report.rows.empty()) return;
  bool first = true;
  for (const auto& [key, cell] : report.rows.front()) {
    out << (first ? "" : ",") << key;
    first = false;
  }
  out << '\n';
  for (const auto& row : report.rows) {
    first = true;
    for (const auto& [key, cell] : row) {
      out << (first ? "" : ",") << csv_field(cell);
      first = false;
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["command"] = report.command;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (const auto& [key, cell] : row) obj[key] = json_field(cell);
    rows.push_back(std::move(obj));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

inline void write_json(std::ostream& out, const Report& report) { out << to_json(report).dump(2) << '\n'; }

/// "key = value" lines; exact rationals also show their rounded decimal.
inline void write_text(std::ostream& out, const Report& report) {
  for (const auto& row : report.rows) {
    for (const auto& [key, cell] : row) {
      out << key << " = ";
      if (const auto* r = std::get_if<Rational>(&cell.value)) {
        out << to_fraction_string(*r) << " (" << csv_field(cell) << ")";
      } else if (const auto* d = std::get_if<double>(&cell.value)) {
        out << to_fixed(*d, 6);
      } else {
        out << csv_field(cell);
      }
      out << '\n';
    }
    if (report.rows.size() > 1) out << '\n';
  }
}

}  // namespace servicerule::cli
