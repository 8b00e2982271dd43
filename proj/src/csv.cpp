#include "qngf/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "qngf/error.hpp"

namespace qngf::csv {

std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r");
    const auto last = cell.find_last_not_of(" \t\r");
    cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
  }
  return cells;
}

}  // namespace

int Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

Table read(std::istream& in) {
  Table table;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::invalid_input, "CSV input is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    for (const auto& cell : split(line)) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        fail(ErrorKind::invalid_input, "non-numeric CSV cell '" + cell + "'");
      }
    }
    require(row.size() == table.header.size(), ErrorKind::invalid_input, "CSV row width differs from header");
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace qngf::csv
