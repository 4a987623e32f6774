#include "csvio.hpp"

#include <cmath>
#include <cstdio>

#include "error.hpp"
#include "jsonio.hpp"

namespace ubw1 {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const auto& line : table.provenance) out += "# " + line + "\r\n";
  for (size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c];
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    require(row.size() == table.columns.size(), errc::invalid_argument,
            "CSV row width does not match the schema");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_real(row[c]);
    }
    out += "\r\n";
  }
  return out;
}

void write_csv(const CsvTable& table, const std::string& path) {
  write_text_file(path, render_csv(table));
}

}  // namespace ubw1
