#include "qngf/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "qngf/csv.hpp"
#include "qngf/random.hpp"

namespace qngf {

TimeRule parse_time_rule(const std::string& name) {
  if (name == "literal") return TimeRule::literal;
  if (name == "inverse") return TimeRule::inverse;
  fail(ErrorKind::invalid_parameter, "unknown time rule '" + name + "' (literal, inverse)");
}

std::string to_string(TimeRule rule) { return rule == TimeRule::literal ? "literal" : "inverse"; }

double interaction_time(TimeRule rule, double factor, double probe_frequency) {
  return rule == TimeRule::literal ? factor * probe_frequency : factor / probe_frequency;
}

void SweepConfig::validate(int network_size) const {
  require(grid_size >= 2, ErrorKind::invalid_parameter, "grid size must be >= 2");
  require(grid_low_factor > 0 && grid_high_factor > 0, ErrorKind::invalid_parameter,
          "grid interval factors must be > 0");
  require(time_factor > 0, ErrorKind::invalid_parameter, "time factor must be > 0");
  require(coupled_nodes >= 1 && coupled_nodes <= network_size, ErrorKind::invalid_parameter,
          "number of coupled nodes must lie in [1, N]");
  require(coupling_fraction > 0, ErrorKind::invalid_parameter, "coupling fraction must be > 0");
  require(sweeps >= 1, ErrorKind::invalid_parameter, "number of sweeps must be >= 1");
  require(squeezing >= 0 && probe_thermal >= 0 && temperature >= 0, ErrorKind::invalid_parameter,
          "squeezing, probe excitations and temperature must be >= 0");
}

void PeakConfig::validate() const {
  require(blur_sigma > 0, ErrorKind::invalid_parameter, "blur sigma must be > 0");
  require(sharpness >= 0 && min_value >= 0, ErrorKind::invalid_parameter, "peak thresholds must be >= 0");
  require(!rescale_max || *rescale_max > 0, ErrorKind::invalid_parameter, "rescale target must be > 0");
}

double single_point(const SpectrumData<double>& spectrum, const ProbeConfig<double>& probe, double t,
                    double temperature, double probe_thermal) {
  const auto total = build_total(spectrum, probe);
  const auto initial = compose_state(thermal_network_state(spectrum.frequencies, temperature),
                                     squeezed_probe_state(probe.frequency, probe.squeezing, probe_thermal));
  const double before = probe_excitations(initial, probe.frequency);
  const double after = probe_excitations_at(total, initial, t);
  return std::abs(after - before);
}

std::vector<double> sweep_grid(const SpectrumData<double>& spectrum, const SweepConfig& config) {
  require(spectrum.size() > 0, ErrorKind::invalid_input, "empty spectrum");
  const double lo = config.grid_low_factor * spectrum.frequencies.minCoeff();
  const double hi = config.grid_high_factor * spectrum.frequencies.maxCoeff();
  std::vector<double> grid(config.grid_size);
  for (int i = 0; i < config.grid_size; ++i) grid[i] = lo + (hi - lo) * i / (config.grid_size - 1);
  grid.back() = hi;
  return grid;
}

SweepRecord sweep(const SpectrumData<double>& spectrum, const SweepConfig& config) {
  const int n = static_cast<int>(spectrum.size());
  config.validate(n);
  require(spectrum.has_eigenvectors(), ErrorKind::invalid_input, "sweeps need the Laplacian eigenvectors");

  SweepRecord record;
  record.grid = sweep_grid(spectrum, config);

  // All random draws happen here, before any evaluation.
  Rng rng(config.seed);
  std::vector<int> nodes(n);
  for (int s = 0; s < config.sweeps; ++s) {
    std::iota(nodes.begin(), nodes.end(), 0);
    for (int i = 0; i < config.coupled_nodes; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(nodes[i], nodes[j]);
    }
    std::vector<int> subset(nodes.begin(), nodes.begin() + config.coupled_nodes);
    std::sort(subset.begin(), subset.end());
    record.node_subsets.push_back(std::move(subset));
  }

  const double strength = config.coupling_fraction * spectrum.coupling / config.coupled_nodes;
  for (const auto& subset : record.node_subsets) {
    ProbeConfig<double> probe;
    probe.squeezing = config.squeezing;
    probe.coupling = Vector<double>::Zero(n);
    for (int v : subset) probe.coupling[v] = strength;

    std::vector<double> values;
    values.reserve(record.grid.size());
    for (double omega_s : record.grid) {
      probe.frequency = omega_s;
      const double t = interaction_time(config.time_rule, config.time_factor, omega_s);
      values.push_back(single_point(spectrum, probe, t, config.temperature, config.probe_thermal));
    }
    record.per_sweep.push_back(std::move(values));
  }
  record.average = average_of_first(record, config.sweeps);
  return record;
}

std::vector<double> average_of_first(const SweepRecord& record, int count) {
  require(count >= 1 && count <= static_cast<int>(record.per_sweep.size()), ErrorKind::invalid_parameter,
          "sweep count out of range");
  std::vector<double> avg(record.grid.size(), 0.0);
  for (int s = 0; s < count; ++s)
    for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += record.per_sweep[s][i];
  for (double& v : avg) v /= count;
  return avg;
}

std::vector<double> gaussian_blur(const std::vector<double>& values, double sigma) {
  require(sigma > 0, ErrorKind::invalid_parameter, "blur sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(4 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  for (int j = -radius; j <= radius; ++j) kernel[j + radius] = std::exp(-0.5 * j * j / (sigma * sigma));
  const double norm = std::accumulate(kernel.begin(), kernel.end(), 0.0);
  for (double& k : kernel) k /= norm;

  const int n = static_cast<int>(values.size());
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0;
    for (int j = -radius; j <= radius; ++j) acc += kernel[j + radius] * values[std::clamp(i + j, 0, n - 1)];
    out[i] = acc;
  }
  return out;
}

std::vector<int> find_peaks(const std::vector<double>& values, const PeakConfig& config) {
  config.validate();
  require(values.size() >= 3, ErrorKind::invalid_input, "peak search needs at least 3 values");

  std::vector<double> data = values;
  if (config.rescale_max) {
    const double top = *std::max_element(data.begin(), data.end());
    if (top > 0)
      for (double& v : data) v *= *config.rescale_max / top;
  }
  const auto blurred = gaussian_blur(data, config.blur_sigma);
  const int n = static_cast<int>(blurred.size());
  auto at = [&](int i) { return blurred[std::clamp(i, 0, n - 1)]; };

  std::vector<int> peaks;
  for (int i = 0; i < n;) {
    // Plateau [i, end): a maximum if strictly above both neighbouring values.
    int end = i + 1;
    while (end < n && blurred[end] == blurred[i]) ++end;
    const bool rises = i > 0 && blurred[i] > blurred[i - 1];
    const bool falls = end < n && blurred[i] > blurred[end];
    if (rises && falls) {
      const double second = at(i - 1) - 2 * blurred[i] + at(i + 1);
      if (-second > config.sharpness && blurred[i] >= config.min_value) peaks.push_back(i);
    }
    i = end;
  }
  return peaks;
}

std::vector<double> probed_frequencies(const std::vector<double>& grid, const std::vector<double>& values,
                                       const PeakConfig& config) {
  require(grid.size() == values.size(), ErrorKind::invalid_input, "grid and values lengths differ");
  std::vector<double> out;
  for (int i : find_peaks(values, config)) out.push_back(grid[i]);
  require(!out.empty(), ErrorKind::empty_output, "no peaks detected in the sweep");
  std::sort(out.begin(), out.end());
  return out;
}

double matched_fraction(const std::vector<double>& modes, const std::vector<double>& detected, double tolerance) {
  if (modes.empty()) return 0;
  std::vector<double> sorted = detected;
  std::sort(sorted.begin(), sorted.end());
  int hits = 0;
  for (double w : modes) {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), w - tolerance);
    if (it != sorted.end() && *it <= w + tolerance) ++hits;
  }
  return static_cast<double>(hits) / modes.size();
}

void write_sweep_csv(std::ostream& out, const SweepRecord& record) {
  std::vector<std::string> header{"omega_s", "delta_n_avg"};
  for (std::size_t s = 0; s < record.per_sweep.size(); ++s) header.push_back("delta_n_sweep_" + std::to_string(s + 1));
  csv::write_row(out, header);
  for (std::size_t i = 0; i < record.grid.size(); ++i) {
    std::vector<std::string> row{csv::format(record.grid[i]), csv::format(record.average[i])};
    for (const auto& s : record.per_sweep) row.push_back(csv::format(s[i]));
    csv::write_row(out, row);
  }
}

void write_peaks_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<int>& peaks) {
  csv::write_row(out, {"peak_index", "omega_s"});
  for (int i : peaks) csv::write_row(out, {std::to_string(i), csv::format(grid[i])});
}

}  // namespace qngf
