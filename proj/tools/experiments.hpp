#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qngf/estimator.hpp"
#include "qngf/ngf.hpp"
#include "qngf/probe.hpp"

namespace qngf::cli {

/// Every setting the subcommands read. Field names double as the flat
/// config-file keys and long option names.
struct ExperimentConfig {
  // network
  int dimension = 2;
  int flavor = -1;
  int nodes = 50;
  std::uint64_t seed = 1;
  // physics
  double omega0 = 0.25;
  double coupling = 0.1;
  // estimator
  double alpha = 0.05;
  int min_points = 10;
  std::string criterion = "r2";
  // sweep
  SweepConfig sweep;
  std::string t_mode = "literal";  // literal | inverse
  // peaks
  PeakConfig peaks;
  // robustness
  std::vector<double> missing{0.0, 0.1, 0.2, 0.3};
  std::vector<double> noise{0.0, 0.05};
  int repetitions = 10;
  std::string noise_reference = "frequency";
  // initial-states
  std::vector<double> state_squeezing{1.0, 2.5, 3.0};
  std::vector<double> state_temperatures{0.5, 2.0, 10.0, 50.0};
  double state_rescale = 35;
  // io
  std::filesystem::path out = "out";
  std::string input;
};

/// Master seed -> per-stage seeds. Stage seeds are derive_seed(master, k)
/// with k = 1 (network growth), 2 (perturbations), 3 (probe sweeps).
struct SeedPlan {
  std::uint64_t master;
  std::uint64_t network;
  std::uint64_t perturbation;
  std::uint64_t sweep;

  explicit SeedPlan(std::uint64_t master_seed);
};

/// What a command produced; feeds the run manifest.
struct RunLog {
  std::vector<std::string> outputs;
  std::map<std::string, double> timings_ms;
  std::string summary;

  void add_output(const std::filesystem::path& path) { outputs.push_back(path.filename().string()); }
};

class StageTimer {
 public:
  StageTimer(RunLog& log, std::string stage)
      : log_(log), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
  ~StageTimer() {
    log_.timings_ms[stage_] +=
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  RunLog& log_;
  std::string stage_;
  std::chrono::steady_clock::time_point start_;
};

void cmd_generate(const ExperimentConfig& config, RunLog& log);
void cmd_spectrum(const ExperimentConfig& config, RunLog& log);
void cmd_estimate(const ExperimentConfig& config, RunLog& log);
void cmd_sweep(const ExperimentConfig& config, RunLog& log);
void cmd_probe(const ExperimentConfig& config, RunLog& log);
void cmd_robustness(const ExperimentConfig& config, RunLog& log);
void cmd_initial_states(const ExperimentConfig& config, RunLog& log);

}  // namespace qngf::cli
