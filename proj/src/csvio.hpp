#pragma once

// CSV emission: RFC-4180 rows, '.' decimal point, 17 significant digits,
// infinities as "inf"/"-inf", plus a provenance header comment.

#include <string>
#include <vector>

namespace ubw1 {

struct CsvTable {
  std::vector<std::string> provenance;  // emitted as leading '# ' lines
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_real(double v);
std::string render_csv(const CsvTable& table);
void write_csv(const CsvTable& table, const std::string& path);

}  // namespace ubw1
