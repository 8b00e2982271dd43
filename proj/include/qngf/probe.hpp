#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qngf/gaussian.hpp"
#include "qngf/spectral.hpp"

namespace qngf {

/// How the interaction time follows the probe frequency.
enum class TimeRule {
  literal,  // t = factor * omega_s
  inverse,  // t = factor / omega_s
};

TimeRule parse_time_rule(const std::string& name);
std::string to_string(TimeRule rule);

double interaction_time(TimeRule rule, double factor, double probe_frequency);

struct SweepConfig {
  int grid_size = 500;
  double grid_low_factor = 0.9;   // grid starts at factor * smallest mode frequency
  double grid_high_factor = 1.1;  // and ends at factor * largest mode frequency
  TimeRule time_rule = TimeRule::literal;
  double time_factor = 40000;
  int coupled_nodes = 8;
  double coupling_fraction = 0.05;  // sum of k_i = fraction * g
  int sweeps = 10;
  std::uint64_t seed = 1;
  double squeezing = 2.5;
  double probe_thermal = 0;  // thermal excitations of the probe before squeezing
  double temperature = 0;    // network temperature

  void validate(int network_size) const;
};

struct SweepRecord {
  std::vector<double> grid;
  std::vector<std::vector<double>> per_sweep;  // [sweep][grid point]
  std::vector<double> average;
  std::vector<std::vector<int>> node_subsets;  // sorted, one per sweep
};

struct PeakConfig {
  double blur_sigma = 0.55;  // grid samples
  double sharpness = 1;
  double min_value = 0.1;
  std::optional<double> rescale_max;

  void validate() const;
};

/// Prepares network (thermal at `temperature`) and probe (squeezed thermal),
/// evolves for time t and returns |<n(t)> - <n(0)>|.
double single_point(const SpectrumData<double>& spectrum, const ProbeConfig<double>& probe, double t,
                    double temperature = 0, double probe_thermal = 0);

/// Equidistant probe frequencies over [low*omega_min, high*omega_max].
std::vector<double> sweep_grid(const SpectrumData<double>& spectrum, const SweepConfig& config);

/// Runs config.sweeps frequency sweeps. Node subsets are drawn up front from
/// the seeded stream; each sweep couples to its own subset with equal k_i.
SweepRecord sweep(const SpectrumData<double>& spectrum, const SweepConfig& config);

/// Mean over the first `count` sweeps of a record.
std::vector<double> average_of_first(const SweepRecord& record, int count);

/// Convolution with a normalised Gaussian truncated at ceil(4 sigma),
/// repeat-padding both edges.
std::vector<double> gaussian_blur(const std::vector<double>& values, double sigma);

/// Indices of peaks that survive blurring with enough sharpness and height.
std::vector<int> find_peaks(const std::vector<double>& values, const PeakConfig& config);

/// Grid frequencies at the detected peaks of `values`, ascending.
/// Throws empty_output when nothing is detected.
std::vector<double> probed_frequencies(const std::vector<double>& grid, const std::vector<double>& values,
                                       const PeakConfig& config);

inline std::vector<double> probed_frequencies(const SweepRecord& record, const PeakConfig& config) {
  return probed_frequencies(record.grid, record.average, config);
}

/// Fraction of `modes` that have a detected frequency within `tolerance`.
double matched_fraction(const std::vector<double>& modes, const std::vector<double>& detected, double tolerance);

/// CSV with columns omega_s,delta_n_avg,delta_n_sweep_1..K.
void write_sweep_csv(std::ostream& out, const SweepRecord& record);
/// CSV with columns peak_index,omega_s.
void write_peaks_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<int>& peaks);

}  // namespace qngf
