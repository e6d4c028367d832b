#pragma once

// Minimal CSV handling: comma-separated, header row required, no quoting,
// empty fields mean missing values.

#include <iosfwd>
#include <string>
#include <vector>

namespace spatsel {

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  int col(const std::string& name) const;  // -1 when absent
  size_t n_rows() const { return rows.size(); }
};

CsvTable read_csv(std::istream& in, const std::string& what = "csv");
CsvTable read_csv_file(const std::string& path);

// Parses a cell as double; empty -> nan (missing); junk -> data_error naming
// the 1-based row/column position.
double parse_numeric_cell(const std::string& cell, size_t row, const std::string& column);

}  // namespace spatsel
