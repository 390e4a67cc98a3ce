#include "kt/csv.hpp"

#include <cstdio>

namespace kt {

namespace {

std::string escape_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void emit_row(std::ostream& os, const std::vector<std::string>& row) {
  for (size_t i = 0; i < row.size(); ++i) {
    if (i) os << ',';
    os << escape_cell(row[i]);
  }
  os << '\n';
}

}  // namespace

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void emit_csv(std::ostream& os, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows) {
  emit_row(os, header);
  for (const auto& row : rows) emit_row(os, row);
}

}  // namespace kt
