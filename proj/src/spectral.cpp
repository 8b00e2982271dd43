#include "qngf/spectral.hpp"

#include <ostream>

#include "qngf/csv.hpp"

namespace qngf {

std::vector<CumulativePoint> cumulative(const std::vector<double>& sorted_values) {
  require(!sorted_values.empty(), ErrorKind::invalid_input, "cumulative of an empty list");
  require(std::is_sorted(sorted_values.begin(), sorted_values.end()), ErrorKind::invalid_input,
          "cumulative input must be sorted");
  const double n = static_cast<double>(sorted_values.size());
  std::vector<CumulativePoint> out;
  for (std::size_t i = 0; i < sorted_values.size(); ++i) {
    if (i + 1 < sorted_values.size() && sorted_values[i + 1] == sorted_values[i]) continue;
    out.push_back({sorted_values[i], static_cast<double>(i + 1) / n});
  }
  return out;
}

void write_spectrum_csv(std::ostream& out, const SpectrumData<double>& spectrum) {
  csv::write_row(out, {"index", "lambda", "omega"});
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    csv::write_row(out, {std::to_string(i + 1), csv::format(spectrum.eigenvalues[i]),
                         csv::format(spectrum.frequencies[i])});
}

}  // namespace qngf
