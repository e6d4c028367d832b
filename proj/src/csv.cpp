#include "spatsel/csv.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "spatsel/errors.hpp"

namespace spatsel {

namespace {

std::string trim(std::string s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.erase(s.begin());
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  return s;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

int CsvTable::col(const std::string& name) const {
  for (size_t j = 0; j < columns.size(); ++j)
    if (columns[j] == name) return static_cast<int>(j);
  return -1;
}

CsvTable read_csv(std::istream& in, const std::string& what) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw data_error(what + ": missing header row");
  table.columns = split_line(line);
  size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (cells.size() != table.columns.size()) {
      std::ostringstream msg;
      msg << what << ": row " << row << " has " << cells.size() << " cells, expected "
          << table.columns.size();
      throw data_error(msg.str());
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open " + path);
  return read_csv(in, path);
}

double parse_numeric_cell(const std::string& cell, size_t row, const std::string& column) {
  if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != cell.size()) {
    std::ostringstream msg;
    msg << "non-numeric cell '" << cell << "' at row " << row << ", column '" << column << "'";
    throw data_error(msg.str());
  }
  return v;
}

}  // namespace spatsel
