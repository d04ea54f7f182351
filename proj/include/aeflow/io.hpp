#pragma once

#include "aeflow/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace aeflow {

/// 17 significant digits: enough to round-trip any double, locale-independent.
inline std::string format_cell(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// UTF-8, LF line endings, '.' decimal separator, mandatory header row.
inline std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_cell(row[c]);
    }
    out += '\n';
  }
  return out;
}

/// JSON array of row objects with the same cells as the CSV, written by hand
/// so every number carries the same 17-significant-digit text.
inline std::string to_json_rows(const Table& table) {
  std::string out = "[\n";
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += "  {";
    for (std::size_t c = 0; c < table.rows[r].size(); ++c) {
      if (c) out += ", ";
      out += '"';
      out += table.columns[c];
      out += "\": ";
      const double x = table.rows[r][c];
      out += std::isfinite(x) ? format_cell(x) : ("\"" + format_cell(x) + "\"");
    }
    out += r + 1 < table.rows.size() ? "},\n" : "}\n";
  }
  out += "]\n";
  return out;
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << contents;
  if (!out) throw std::runtime_error("failed while writing: " + path);
}

}  // namespace aeflow
