#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace kt {

/** Format a double with 17 significant digits (lossless round trip). */
std::string csv_number(double x);

/**
 * Write a CSV table: one header row, then the data rows, LF line endings.
 * Cells containing a comma, quote or line break are quoted with internal
 * quotes doubled; an empty row list yields just the header.
 */
void emit_csv(std::ostream& os, const std::vector<std::string>& header,
              const std::vector<std::vector<std::string>>& rows);

}  // namespace kt
