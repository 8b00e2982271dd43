#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "qngf/csv.hpp"
#include "qngf/ngf.hpp"
#include "qngf/probe.hpp"

using namespace qngf;
using Eigen::VectorXd;

namespace {

SpectrumData<double> single_mode(double omega) {
  SpectrumData<double> s;
  s.eigenvalues = VectorXd::Zero(1);
  s.eigenvectors = Eigen::MatrixXd::Ones(1, 1);
  s.omega0 = omega;
  s.coupling = 0.1;
  s.frequencies = VectorXd::Constant(1, omega);
  return s;
}

SpectrumData<double> network(int nodes, std::uint64_t seed) {
  return make_spectrum(laplacian(to_adjacency(grow({2, -1, nodes, seed}))).cast<double>().eval(), 0.25, 0.1);
}

}  // namespace

TEST_CASE("resonant exchange with one mode") {
  // Weak resonant coupling: rotating-wave picture gives
  // n(t) = n(0) cos^2(kappa t) with kappa = k / (2 omega) for a vacuum partner.
  const double omega = 0.5, k = 1e-4;
  const auto spectrum = single_mode(omega);
  ProbeConfig<double> probe{omega, 1.0, VectorXd::Constant(1, k)};
  const double n0 = std::pow(std::sinh(1.0), 2);
  const double kappa = k / (2 * omega);
  for (double phase : {0.3, std::numbers::pi / 4, 1.2}) {
    const double t = phase / kappa;
    const double expected = n0 * std::pow(std::sin(phase), 2);
    CHECK(single_point(spectrum, probe, t) == doctest::Approx(expected).epsilon(0.01));
  }
  // Far off resonance almost nothing is exchanged.
  probe.frequency = 0.8;
  CHECK(single_point(spectrum, probe, std::numbers::pi / 4 / kappa) < 1e-3 * n0);
}

TEST_CASE("interaction time rules") {
  CHECK(interaction_time(TimeRule::literal, 40000, 0.5) == 20000);
  CHECK(interaction_time(TimeRule::inverse, 40000, 0.5) == 80000);
  CHECK(parse_time_rule("inverse") == TimeRule::inverse);
  CHECK(to_string(TimeRule::literal) == "literal");
  CHECK_THROWS_AS(parse_time_rule("linear"), Error);
}

TEST_CASE("sweep grid and node draws") {
  const auto spectrum = network(30, 4);
  SweepConfig cfg;
  cfg.grid_size = 40;
  cfg.sweeps = 3;
  cfg.seed = 77;
  const auto grid = sweep_grid(spectrum, cfg);
  REQUIRE(grid.size() == 40u);
  CHECK(grid.front() == doctest::Approx(0.9 * 0.25));
  CHECK(grid.back() == 1.1 * spectrum.frequencies.maxCoeff());

  const auto rec = sweep(spectrum, cfg);
  REQUIRE(rec.per_sweep.size() == 3u);
  REQUIRE(rec.node_subsets.size() == 3u);
  for (const auto& subset : rec.node_subsets) {
    CHECK(subset.size() == 8u);
    CHECK(std::set<int>(subset.begin(), subset.end()).size() == 8u);
    CHECK(std::is_sorted(subset.begin(), subset.end()));
    CHECK(subset.back() < 30);
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double mean = (rec.per_sweep[0][i] + rec.per_sweep[1][i] + rec.per_sweep[2][i]) / 3;
    CHECK(rec.average[i] == doctest::Approx(mean));
  }
  const auto again = sweep(spectrum, cfg);
  CHECK(again.per_sweep == rec.per_sweep);
  CHECK(again.node_subsets == rec.node_subsets);
  CHECK(average_of_first(rec, 1) == rec.per_sweep[0]);

  // Each sweep point equals an independent single-point evaluation.
  ProbeConfig<double> probe;
  probe.squeezing = cfg.squeezing;
  probe.coupling = VectorXd::Zero(30);
  for (int v : rec.node_subsets[1]) probe.coupling[v] = cfg.coupling_fraction * 0.1 / 8;
  probe.frequency = grid[17];
  CHECK(rec.per_sweep[1][17] == single_point(spectrum, probe, 40000 * grid[17]));

  cfg.coupled_nodes = 31;
  CHECK_THROWS_AS(sweep(spectrum, cfg), Error);
}

TEST_CASE("blur kernel") {
  std::vector<double> impulse(41, 0.0);
  impulse[20] = 1;
  const double sigma = 1.3;
  const auto out = gaussian_blur(impulse, sigma);
  const int radius = static_cast<int>(std::ceil(4 * sigma));
  double norm = 0;
  for (int j = -radius; j <= radius; ++j) norm += std::exp(-j * j / (2 * sigma * sigma));
  for (int i = 0; i < 41; ++i) {
    const int j = i - 20;
    const double expected = std::abs(j) <= radius ? std::exp(-j * j / (2 * sigma * sigma)) / norm : 0.0;
    CHECK(out[i] == doctest::Approx(expected).epsilon(1e-14));
  }
  const auto flat = gaussian_blur(std::vector<double>(10, 3.0), 2.0);
  for (double v : flat) CHECK(v == doctest::Approx(3.0));
}

TEST_CASE("peak finding") {
  std::vector<double> v(200, 0.0);
  v[50] = 10;
  v[120] = 6;
  v[160] = 0.05;  // below the height threshold after blurring
  for (int i = 0; i < 200; ++i) v[i] += 3 * std::exp(-std::pow((i - 90) / 20.0, 2));  // broad, not sharp
  PeakConfig cfg;
  CHECK(find_peaks(v, cfg) == std::vector<int>{50, 120});

  std::vector<double> edge(50, 0.0);
  edge[0] = edge[1] = 5;  // plateau on the boundary
  CHECK(find_peaks(edge, cfg).empty());

  std::vector<double> grid(200);
  for (int i = 0; i < 200; ++i) grid[i] = 0.1 * i;
  const auto f = probed_frequencies(grid, v, cfg);
  CHECK(f == std::vector<double>{grid[50], grid[120]});

  // Rescaling changes which peaks clear the thresholds.
  std::vector<double> small(100, 0.0);
  small[40] = 0.5;
  CHECK(find_peaks(small, cfg).empty());
  cfg.rescale_max = 35;
  CHECK(find_peaks(small, cfg) == std::vector<int>{40});

  try {
    probed_frequencies(std::vector<double>(100, 0.0), std::vector<double>(100, 0.0), PeakConfig{});
    FAIL("expected empty output");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_output);
  }
}

TEST_CASE("matched fraction") {
  CHECK(matched_fraction({1.0, 2.0, 3.0, 4.0}, {1.05, 2.5, 3.99}, 0.1) == 0.5);
  CHECK(matched_fraction({1.0}, {}, 0.1) == 0);
}

TEST_CASE("largest response sits next to a total-system eigenfrequency") {
  const auto spectrum = network(12, 6);
  SweepConfig cfg;
  cfg.grid_size = 300;
  cfg.coupled_nodes = 1;
  cfg.sweeps = 1;
  cfg.time_rule = TimeRule::inverse;
  const auto rec = sweep(spectrum, cfg);
  const double spacing = rec.grid[1] - rec.grid[0];
  const auto top = std::max_element(rec.average.begin(), rec.average.end()) - rec.average.begin();
  ProbeConfig<double> probe;
  probe.frequency = rec.grid[top];
  probe.coupling = VectorXd::Zero(12);
  probe.coupling[rec.node_subsets[0][0]] = cfg.coupling_fraction * 0.1;
  const auto total = build_total(spectrum, probe);
  double nearest = 1e9;
  for (double w : total.eigenfrequencies) nearest = std::min(nearest, std::abs(w - rec.grid[top]));
  CHECK(nearest <= spacing);
}

TEST_CASE("vacuum network: response proportional to initial probe excitations") {
  const auto spectrum = network(50, 1);
  ProbeConfig<double> probe;
  probe.coupling = VectorXd::Zero(50);
  for (int v : {3, 9, 14, 22, 30, 37, 41, 48}) probe.coupling[v] = 0.05 * 0.1 / 8;
  for (int mode : {3, 10, 25}) {
    probe.frequency = spectrum.frequencies[mode] * (1 + 1e-4);
    const double t = 40000 * probe.frequency;
    std::vector<double> ratios;
    for (double r : {1.0, 2.5, 3.0}) {
      probe.squeezing = r;
      ratios.push_back(single_point(spectrum, probe, t) / std::pow(std::sinh(r), 2));
    }
    probe.squeezing = 0;
    ratios.push_back(single_point(spectrum, probe, t, 0.0, 5.0) / 5.0);
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CAPTURE(mode);
    CHECK(*hi / *lo - 1 < 0.10);
  }
}

TEST_CASE("sweep and peaks CSV") {
  SweepRecord rec;
  rec.grid = {0.1, 0.2, 0.3};
  rec.per_sweep = {{1, 2, 3}, {3, 2, 1}};
  rec.average = {2, 2, 2};
  std::stringstream ss;
  write_sweep_csv(ss, rec);
  const auto t = csv::read(ss);
  CHECK(t.header == std::vector<std::string>{"omega_s", "delta_n_avg", "delta_n_sweep_1", "delta_n_sweep_2"});
  CHECK(t.rows.size() == 3u);
  std::stringstream ps;
  write_peaks_csv(ps, rec.grid, {1});
  const auto p = csv::read(ps);
  CHECK(p.header == std::vector<std::string>{"peak_index", "omega_s"});
  CHECK(p.rows[0][1] == 0.2);
}
