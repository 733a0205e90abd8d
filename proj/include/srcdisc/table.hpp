#pragma once

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace srcdisc {

/// Floats are printed with 12 significant digits everywhere the CLI emits
/// them, so identical invocations produce identical bytes.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  if (v == 0.0) return "0";  // avoid the "-0" spelling
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

using Cell = std::variant<double, long long, bool, std::string>;

inline std::string to_csv_field(const Cell& cell) {
  if (std::holds_alternative<double>(cell))
    return format_double(std::get<double>(cell));
  if (std::holds_alternative<long long>(cell))
    return std::to_string(std::get<long long>(cell));
  if (std::holds_alternative<bool>(cell))
    return std::get<bool>(cell) ? "true" : "false";
  return std::get<std::string>(cell);
}

/// Fixed-schema record table. Column order is part of the output contract;
/// the JSON form is a records array mirroring the CSV columns.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) { rows.push_back(std::move(row)); }

  std::string to_csv() const {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += columns[c];
    }
    out += '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += to_csv_field(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  std::string to_json() const {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json rec;
      for (std::size_t c = 0; c < row.size(); ++c) {
        const Cell& cell = row[c];
        if (std::holds_alternative<double>(cell))
          rec[columns[c]] = std::get<double>(cell);
        else if (std::holds_alternative<long long>(cell))
          rec[columns[c]] = std::get<long long>(cell);
        else if (std::holds_alternative<bool>(cell))
          rec[columns[c]] = std::get<bool>(cell);
        else
          rec[columns[c]] = std::get<std::string>(cell);
      }
      records.push_back(std::move(rec));
    }
    return records.dump(2) + "\n";
  }
};

}  // namespace srcdisc
