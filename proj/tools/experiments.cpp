#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

#include "qngf/csv.hpp"
#include "qngf/random.hpp"
#include "qngf/spectral.hpp"

namespace qngf::cli {

SeedPlan::SeedPlan(std::uint64_t master_seed)
    : master(master_seed),
      network(derive_seed(master_seed, 1)),
      perturbation(derive_seed(master_seed, 2)),
      sweep(derive_seed(master_seed, 3)) {}

namespace {

std::ofstream open_output(const ExperimentConfig& config, const std::string& name, RunLog& log) {
  std::filesystem::create_directories(config.out);
  const auto path = config.out / name;
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::invalid_input, "cannot write " + path.string());
  log.add_output(path);
  return out;
}

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string summary_line(const FitResult& fit) {
  return "d_s=" + fixed(fit.d_s) + " ci_low=" + fixed(fit.ci_low) + " ci_high=" + fixed(fit.ci_high) +
         " r2=" + fixed(fit.r2) + " cutoff_freq=" + fixed(fit.cutoff_frequency);
}

void write_summary_csv(std::ostream& out, const FitResult& fit) {
  csv::write_row(out, {"d_s", "ci_low", "ci_high", "r2", "cutoff_freq", "cutoff_index"});
  csv::write_row(out, {csv::format(fit.d_s), csv::format(fit.ci_low), csv::format(fit.ci_high), csv::format(fit.r2),
                       csv::format(fit.cutoff_frequency), std::to_string(fit.cutoff_index)});
}

GrowthConfig growth_config(const ExperimentConfig& config) {
  return {config.dimension, config.flavor, config.nodes, SeedPlan(config.seed).network};
}

Eigen::MatrixXi load_graph(const ExperimentConfig& config, RunLog& log) {
  Eigen::MatrixXi adjacency;
  if (!config.input.empty()) {
    StageTimer timer(log, "read_edges");
    std::ifstream in(config.input);
    require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open " + config.input);
    const auto file = read_edge_list(in);
    adjacency = adjacency_from_edges(file.nodes, file.edges);
  } else {
    StageTimer timer(log, "grow");
    adjacency = to_adjacency(grow(growth_config(config)));
  }
  const int components = connected_components(adjacency);
  require(components == 1, ErrorKind::invalid_input,
          "graph is disconnected: " + std::to_string(components) + " connected components over " +
              std::to_string(adjacency.rows()) + " nodes");
  return adjacency;
}

SpectrumData<double> load_spectrum(const ExperimentConfig& config, RunLog& log, bool with_vectors) {
  const auto adjacency = load_graph(config, log);
  StageTimer timer(log, "eigensolve");
  return make_spectrum(laplacian(adjacency).cast<double>(), config.omega0, config.coupling, with_vectors);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

FitInput fit_input(const ExperimentConfig& config, std::vector<double> frequencies) {
  FitInput in;
  in.frequencies = std::move(frequencies);
  in.min_points = config.min_points;
  return in;
}

SweepConfig sweep_config(const ExperimentConfig& config) {
  SweepConfig s = config.sweep;
  s.time_rule = parse_time_rule(config.t_mode);
  s.seed = SeedPlan(config.seed).sweep;
  return s;
}

// Frequencies from a CSV: the omega column, else lambda mapped through
// (omega0, g), else the first column.
std::vector<double> read_frequencies(const ExperimentConfig& config) {
  std::ifstream in(config.input);
  require(static_cast<bool>(in), ErrorKind::invalid_input, "cannot open " + config.input);
  const auto table = csv::read(in);
  require(!table.header.empty(), ErrorKind::invalid_input, "CSV has no columns");
  std::vector<double> values;
  if (int c = table.column("omega"); c >= 0) {
    for (const auto& row : table.rows) values.push_back(row[c]);
  } else if (int l = table.column("lambda"); l >= 0) {
    Eigen::VectorXd lambda(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) lambda[i] = table.rows[i][l];
    clamp_zero_eigenvalues(lambda);
    values = to_std(mode_frequencies(lambda, config.omega0, config.coupling));
  } else {
    for (const auto& row : table.rows) values.push_back(row[0]);
  }
  std::sort(values.begin(), values.end());
  return values;
}

double thermal_occupation(double frequency, double temperature) {
  return temperature > 0 ? 1.0 / std::expm1(frequency / temperature) : 0.0;
}

}  // namespace

void cmd_generate(const ExperimentConfig& config, RunLog& log) {
  const auto growth = growth_config(config);
  SimplicialComplex complex = [&] {
    StageTimer timer(log, "grow");
    return grow(growth);
  }();
  auto out = open_output(config, "network.edges", log);
  write_edge_list(out, complex, growth.seed);
  log.summary = "nodes=" + std::to_string(complex.node_count()) +
                " simplices=" + std::to_string(complex.simplices().size()) +
                " edges=" + std::to_string(edges(complex).size());
}

void cmd_spectrum(const ExperimentConfig& config, RunLog& log) {
  const auto spectrum = load_spectrum(config, log, false);
  {
    auto out = open_output(config, "spectrum.csv", log);
    write_spectrum_csv(out, spectrum);
  }
  {
    auto out = open_output(config, "cumulative_lambda.csv", log);
    csv::write_row(out, {"lambda", "rho_c"});
    for (const auto& p : cumulative(to_std(spectrum.eigenvalues)))
      csv::write_row(out, {csv::format(p.value), csv::format(p.fraction)});
  }
  {
    auto out = open_output(config, "cumulative_omega.csv", log);
    csv::write_row(out, {"omega", "p_c"});
    for (const auto& p : cumulative(to_std(spectrum.frequencies)))
      csv::write_row(out, {csv::format(p.value), csv::format(p.fraction)});
  }
  log.summary = "nodes=" + std::to_string(spectrum.size()) + " lambda_2=" + csv::format(spectrum.eigenvalues[1]) +
                " lambda_max=" + csv::format(spectrum.eigenvalues.maxCoeff());
}

void cmd_estimate(const ExperimentConfig& config, RunLog& log) {
  std::vector<double> frequencies;
  if (!config.input.empty() && config.input.ends_with(".csv")) {
    frequencies = read_frequencies(config);
  } else {
    frequencies = to_std(load_spectrum(config, log, false).frequencies);
  }
  const auto est = [&] {
    StageTimer timer(log, "estimate");
    return analyze(fit_input(config, frequencies), config.alpha, parse_criterion(config.criterion));
  }();
  {
    auto out = open_output(config, "scan.csv", log);
    write_scan_csv(out, est.scan);
  }
  {
    auto out = open_output(config, "points.csv", log);
    write_points_csv(out, est.points, est.scan[est.best.cutoff_index - config.min_points].fit);
  }
  {
    auto out = open_output(config, "summary.csv", log);
    write_summary_csv(out, est.best);
  }
  log.summary = summary_line(est.best);
}

void cmd_sweep(const ExperimentConfig& config, RunLog& log) {
  const auto spectrum = load_spectrum(config, log, true);
  const auto record = [&] {
    StageTimer timer(log, "sweep");
    return sweep(spectrum, sweep_config(config));
  }();
  auto out = open_output(config, "sweep.csv", log);
  write_sweep_csv(out, record);
  log.summary = "grid=" + std::to_string(record.grid.size()) + " sweeps=" + std::to_string(record.per_sweep.size()) +
                " max_delta_n=" + fixed(*std::max_element(record.average.begin(), record.average.end()));
}

void cmd_probe(const ExperimentConfig& config, RunLog& log) {
  const auto spectrum = load_spectrum(config, log, true);
  const auto modes = to_std(spectrum.frequencies);
  const auto criterion = parse_criterion(config.criterion);
  const auto reference = analyze(fit_input(config, modes), config.alpha, criterion).best;

  const auto record = [&] {
    StageTimer timer(log, "sweep");
    return sweep(spectrum, sweep_config(config));
  }();
  const double spacing = record.grid[1] - record.grid[0];
  {
    auto out = open_output(config, "sweep.csv", log);
    write_sweep_csv(out, record);
  }

  const auto peaks = find_peaks(record.average, config.peaks);
  {
    auto out = open_output(config, "peaks.csv", log);
    write_peaks_csv(out, record.grid, peaks);
  }
  require(!peaks.empty(), ErrorKind::empty_output,
          "no peaks detected in the averaged sweep; try more sweeps or a lower sharpness/min_value");
  const auto probed = probed_frequencies(record, config.peaks);
  const auto est = analyze(fit_input(config, probed), config.alpha, criterion);
  {
    auto out = open_output(config, "probed_scan.csv", log);
    write_scan_csv(out, est.scan);
  }

  // Estimate after each additional sweep (1 sweep vs all sweeps and in between).
  {
    auto out = open_output(config, "convergence.csv", log);
    csv::write_row(out, {"sweeps", "peaks", "matched_fraction", "d_s", "ci_low", "ci_high"});
    for (int s = 1; s <= static_cast<int>(record.per_sweep.size()); ++s) {
      const auto avg = average_of_first(record, s);
      std::vector<double> found;
      for (int i : find_peaks(avg, config.peaks)) found.push_back(record.grid[i]);
      const double nan = std::numeric_limits<double>::quiet_NaN();
      FitResult fit{nan, nan, 0, nan, nan, nan, nan, 0};
      try {
        fit = estimate(fit_input(config, found), config.alpha, criterion);
      } catch (const Error&) {
        // Too few peaks for a fit; recorded as NaN.
      }
      csv::write_row(out, {std::to_string(s), std::to_string(found.size()),
                           csv::format(matched_fraction(modes, found, spacing)), csv::format(fit.d_s),
                           csv::format(fit.ci_low), csv::format(fit.ci_high)});
    }
  }
  {
    auto out = open_output(config, "summary.csv", log);
    write_summary_csv(out, est.best);
  }
  log.summary = summary_line(est.best) + " full_d_s=" + fixed(reference.d_s) + " peaks=" +
                std::to_string(probed.size()) + " matched=" + fixed(matched_fraction(modes, probed, spacing));
}

void cmd_robustness(const ExperimentConfig& config, RunLog& log) {
  const auto spectrum = load_spectrum(config, log, false);
  const auto modes = to_std(spectrum.frequencies);
  const auto criterion = parse_criterion(config.criterion);
  const auto reference = parse_noise_reference(config.noise_reference);
  const SeedPlan seeds(config.seed);
  require(config.repetitions >= 1, ErrorKind::invalid_parameter, "repetitions must be >= 1");
  const auto baseline = estimate(fit_input(config, modes), config.alpha, criterion);

  auto out = open_output(config, "robustness.csv", log);
  csv::write_row(out, {"p", "epsilon", "repetitions", "mean_d_s", "median_d_s", "mean_ci_low", "mean_ci_high",
                       "failures"});
  StageTimer timer(log, "robustness");
  for (double p : config.missing) {
    for (double eps : config.noise) {
      std::vector<double> ds;
      double low = 0, high = 0;
      int failures = 0;
      for (int rep = 0; rep < config.repetitions; ++rep) {
        PerturbationSpec spec{p, eps, derive_seed(seeds.perturbation, static_cast<std::uint64_t>(rep)), reference};
        try {
          const auto fit = estimate(fit_input(config, perturb(modes, spec)), config.alpha, criterion);
          ds.push_back(fit.d_s);
          low += fit.ci_low;
          high += fit.ci_high;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::insufficient_data && e.kind() != ErrorKind::empty_output) throw;
          ++failures;
        }
      }
      const double nan = std::numeric_limits<double>::quiet_NaN();
      double mean = nan, median = nan;
      if (!ds.empty()) {
        const double count = static_cast<double>(ds.size());
        mean = 0;
        for (double v : ds) mean += v / count;
        low /= count;
        high /= count;
        std::sort(ds.begin(), ds.end());
        median = ds.size() % 2 ? ds[ds.size() / 2] : 0.5 * (ds[ds.size() / 2 - 1] + ds[ds.size() / 2]);
      } else {
        low = high = nan;
      }
      csv::write_row(out, {csv::format(p), csv::format(eps), std::to_string(config.repetitions), csv::format(mean),
                           csv::format(median), csv::format(low), csv::format(high), std::to_string(failures)});
    }
  }
  log.summary = "baseline " + summary_line(baseline);
}

void cmd_initial_states(const ExperimentConfig& config, RunLog& log) {
  const auto spectrum = load_spectrum(config, log, true);
  const auto criterion = parse_criterion(config.criterion);
  const auto reference = estimate(fit_input(config, to_std(spectrum.frequencies)), config.alpha, criterion);

  struct State {
    std::string label;
    double squeezing;
    double temperature;
  };
  std::vector<State> states;
  for (double r : config.state_squeezing) states.push_back({"squeezed_r=" + csv::format(r), r, 0.0});
  for (double t : config.state_temperatures) states.push_back({"vacuum_T=" + csv::format(t), 0.0, t});

  PeakConfig peaks = config.peaks;
  peaks.rescale_max = config.state_rescale;

  auto out = open_output(config, "initial_states.csv", log);
  csv::write_row(out, {"label", "initial_excitations", "temperature", "excitations_minus_nth", "peaks", "d_s",
                       "ci_low", "ci_high"});
  csv::write_row(out, {"full_spectrum", "nan", "nan", "nan", std::to_string(spectrum.size()),
                       csv::format(reference.d_s), csv::format(reference.ci_low), csv::format(reference.ci_high)});
  StageTimer timer(log, "sweeps");
  for (const auto& state : states) {
    SweepConfig sc = sweep_config(config);
    sc.squeezing = state.squeezing;
    sc.probe_thermal = 0;
    sc.temperature = state.temperature;
    const auto record = sweep(spectrum, sc);
    const auto found = probed_frequencies(record, peaks);
    const auto fit = estimate(fit_input(config, found), config.alpha, criterion);
    const double excitations = std::pow(std::sinh(state.squeezing), 2);
    csv::write_row(out, {state.label, csv::format(excitations), csv::format(state.temperature),
                         csv::format(excitations - thermal_occupation(config.omega0, state.temperature)),
                         std::to_string(found.size()), csv::format(fit.d_s), csv::format(fit.ci_low),
                         csv::format(fit.ci_high)});
  }
  log.summary = "states=" + std::to_string(states.size()) + " full_d_s=" + fixed(reference.d_s);
}

}  // namespace qngf::cli
