#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "rcp/error.hpp"

namespace rcp {

// A list column; always quoted in CSV so the cell count stays fixed.
struct IntList {
  std::vector<long long> values;
};

using Cell = std::variant<std::int64_t, std::uint64_t, double, bool, std::string, IntList>;

// Rows of typed cells under fixed column names. Doubles print with 15
// significant digits so that e.g. 4 - 3.6 shows as 0.4.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;  // emitted as trailing '# ' lines in CSV

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw StateError("table row width differs from header");
    rows.push_back(std::move(row));
  }
};

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

inline std::string format_cell(const Cell& c) {
  struct Visit {
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& s) const {
      if (s.find_first_of(",\"\n") == std::string::npos && !s.empty()) return s;
      std::string out = "\"";
      for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
      }
      return out + "\"";
    }
    std::string operator()(const IntList& l) const {
      std::string out = "\"";
      for (std::size_t i = 0; i < l.values.size(); ++i) out += (i ? "," : "") + std::to_string(l.values[i]);
      return out + "\"";
    }
  };
  return std::visit(Visit{}, c);
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_cell(row[i]);
    out << '\n';
  }
  for (const auto& n : t.notes) out << "# " << n << '\n';
}

}  // namespace rcp
