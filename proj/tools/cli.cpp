#include "cli.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "experiments.hpp"

namespace qngf::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter:
      return exit_config;
    case ErrorKind::numerical_failure:
    case ErrorKind::singular_design:
    case ErrorKind::coupling_too_strong:
    case ErrorKind::physicality_violation:
      return exit_numerical;
    case ErrorKind::insufficient_data:
    case ErrorKind::empty_output:
      return exit_empty;
    case ErrorKind::invalid_input:
      return exit_bad_input;
  }
  return exit_io;
}

std::string kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid_input";
    case ErrorKind::invalid_parameter: return "invalid_parameter";
    case ErrorKind::numerical_failure: return "numerical_failure";
    case ErrorKind::singular_design: return "singular_design";
    case ErrorKind::coupling_too_strong: return "coupling_too_strong";
    case ErrorKind::physicality_violation: return "physicality_violation";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::empty_output: return "empty_output";
  }
  return "unknown";
}

nlohmann::ordered_json config_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["dimension"] = c.dimension;
  j["flavor"] = c.flavor;
  j["nodes"] = c.nodes;
  j["seed"] = c.seed;
  j["omega0"] = c.omega0;
  j["coupling"] = c.coupling;
  j["alpha"] = c.alpha;
  j["min_points"] = c.min_points;
  j["criterion"] = c.criterion;
  j["grid_size"] = c.sweep.grid_size;
  j["grid_low_factor"] = c.sweep.grid_low_factor;
  j["grid_high_factor"] = c.sweep.grid_high_factor;
  j["t_mode"] = c.t_mode;
  j["time_factor"] = c.sweep.time_factor;
  j["coupled_nodes"] = c.sweep.coupled_nodes;
  j["coupling_fraction"] = c.sweep.coupling_fraction;
  j["sweeps"] = c.sweep.sweeps;
  j["squeezing"] = c.sweep.squeezing;
  j["probe_thermal"] = c.sweep.probe_thermal;
  j["temperature"] = c.sweep.temperature;
  j["blur_sigma"] = c.peaks.blur_sigma;
  j["sharpness"] = c.peaks.sharpness;
  j["min_value"] = c.peaks.min_value;
  j["missing"] = c.missing;
  j["noise"] = c.noise;
  j["repetitions"] = c.repetitions;
  j["noise_reference"] = c.noise_reference;
  j["state_squeezing"] = c.state_squeezing;
  j["state_temperatures"] = c.state_temperatures;
  j["state_rescale"] = c.state_rescale;
  j["out"] = c.out.string();
  j["input"] = c.input;
  return j;
}

void write_manifest(const std::string& command, const ExperimentConfig& config, const RunLog& log, int code,
                    const std::string& error, std::ostream& err) {
  const SeedPlan seeds(config.seed);
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["config"] = config_json(config);
  m["seeds"] = {{"master", seeds.master},
                {"network", seeds.network},
                {"perturbation", seeds.perturbation},
                {"sweep", seeds.sweep}};
  m["outputs"] = log.outputs;
  m["timings_ms"] = log.timings_ms;
  m["status"] = code == exit_ok ? "ok" : "error";
  m["exit_code"] = code;
  m["summary"] = log.summary;
  m["error"] = error;
  try {
    std::filesystem::create_directories(config.out);
    std::ofstream file(config.out / "manifest.json", std::ios::binary);
    if (!file) throw std::runtime_error("cannot open");
    file << m.dump(2) << '\n';
  } catch (const std::exception& e) {
    err << "warning: could not write manifest in " << config.out << ": " << e.what() << '\n';
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  std::string out_dir = config.out.string();
  std::optional<double> rescale;

  CLI::App app{"Network geometry from frequency spectra and probe sweeps", "qngf"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML/INI file with flat keys named like the long options");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--seed", config.seed, "Master seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--input", config.input, "Edge list (or frequency CSV for estimate) instead of growing");
  app.add_option("--dimension", config.dimension, "Simplex dimension d");
  app.add_option("--flavor", config.flavor, "Flavor s in {-1,0,1}");
  app.add_option("--nodes", config.nodes, "Number of nodes N");
  app.add_option("--omega0", config.omega0, "Bare oscillator frequency");
  app.add_option("--coupling", config.coupling, "Network spring coupling g");
  app.add_option("--alpha", config.alpha, "Confidence level complement");
  app.add_option("--min_points", config.min_points, "Smallest number of points per fit");
  app.add_option("--criterion", config.criterion, "r2, adjusted_r2, aic, aicc or bic");
  app.add_option("--grid_size", config.sweep.grid_size, "Probe frequencies per sweep");
  app.add_option("--grid_low_factor", config.sweep.grid_low_factor);
  app.add_option("--grid_high_factor", config.sweep.grid_high_factor);
  app.add_option("--t_mode", config.t_mode, "literal (t = factor*omega_s) or inverse (t = factor/omega_s)");
  app.add_option("--time_factor", config.sweep.time_factor);
  app.add_option("--coupled_nodes", config.sweep.coupled_nodes, "Nodes coupled to the probe per sweep");
  app.add_option("--coupling_fraction", config.sweep.coupling_fraction, "Total probe coupling over g");
  app.add_option("--sweeps", config.sweep.sweeps);
  app.add_option("--squeezing", config.sweep.squeezing, "Probe squeezing parameter r");
  app.add_option("--probe_thermal", config.sweep.probe_thermal, "Probe thermal excitations before squeezing");
  app.add_option("--temperature", config.sweep.temperature, "Network temperature");
  app.add_option("--blur_sigma", config.peaks.blur_sigma, "Peak blur width in grid samples");
  app.add_option("--sharpness", config.peaks.sharpness);
  app.add_option("--min_value", config.peaks.min_value);
  app.add_option("--rescale_max", rescale, "Rescale the averaged sweep to this maximum before peak finding");
  app.add_option("--missing", config.missing, "Missing-data probabilities")->delimiter(',');
  app.add_option("--noise", config.noise, "Relative noise levels")->delimiter(',');
  app.add_option("--repetitions", config.repetitions);
  app.add_option("--noise_reference", config.noise_reference, "frequency or mode_offset");
  app.add_option("--state_squeezing", config.state_squeezing)->delimiter(',');
  app.add_option("--state_temperatures", config.state_temperatures)->delimiter(',');
  app.add_option("--state_rescale", config.state_rescale);

  using Command = std::function<void(const ExperimentConfig&, RunLog&)>;
  const std::vector<std::tuple<std::string, std::string, Command>> commands{
      {"generate", "Grow a network and write its edge list", cmd_generate},
      {"spectrum", "Laplacian eigenvalues, mode frequencies and cumulatives", cmd_spectrum},
      {"estimate", "Spectral dimension from the full frequency spectrum", cmd_estimate},
      {"sweep", "Probe excitation sweeps", cmd_sweep},
      {"probe", "Spectral dimension from probe-detected peaks", cmd_probe},
      {"robustness", "Estimates under missing data and relative noise", cmd_robustness},
      {"initial-states", "Probe-based estimates for several initial states", cmd_initial_states},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  std::string command;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config;
  }
  config.out = out_dir;
  config.peaks.rescale_max = rescale;

  RunLog log;
  int code = exit_ok;
  std::string message;
  Command fn;
  for (const auto& [name, help, f] : commands) {
    if (app.got_subcommand(name)) {
      command = name;
      fn = f;
    }
  }
  try {
    fn(config, log);
    if (!log.summary.empty()) out << log.summary << '\n';
  } catch (const Error& e) {
    code = exit_code_for(e.kind());
    message = kind_name(e.kind()) + ": " + e.what();
  } catch (const std::exception& e) {
    code = exit_io;
    message = e.what();
  }
  if (code != exit_ok) err << "error: " << message << '\n';
  write_manifest(command, config, log, code, message, err);
  return code;
}

}  // namespace qngf::cli
