#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qngf::csv {

/// 17 significant digits, shortest %g-style form.
std::string format(double value);

/// Writes one comma-separated row terminated by LF.
void write_row(std::ostream& out, const std::vector<std::string>& cells);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column, or -1.
  int column(const std::string& name) const;
};

/// Numeric CSV with a mandatory header row.
Table read(std::istream& in);

}  // namespace qngf::csv
