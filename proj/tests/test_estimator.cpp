#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "qngf/csv.hpp"
#include "qngf/estimator.hpp"

using namespace qngf;

namespace {

double t_density(double x, double nu) {
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * std::numbers::pi);
  return c * std::pow(1 + x * x / nu, -(nu + 1) / 2);
}

// CDF by composite Simpson on [0, q]; independent of the library's
// continued-fraction route.
double t_cdf_simpson(double q, double nu) {
  const int steps = 20000;
  const double h = q / steps;
  double acc = t_density(0, nu) + t_density(q, nu);
  for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4 : 2) * t_density(i * h, nu);
  return 0.5 + acc * h / 3;
}

// Normal-equations solution with the parameter covariance sigma^2 (X^T X)^-1.
struct Oracle {
  double slope, intercept, r2, se;
};

Oracle normal_equations(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd design(n, 2);
  design.col(0) = x;
  design.col(1).setOnes();
  const Eigen::Matrix2d xtx = design.transpose() * design;
  const Eigen::Vector2d beta = xtx.ldlt().solve(design.transpose() * y);
  const Eigen::VectorXd resid = y - design * beta;
  const double rss = resid.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  const Eigen::Matrix2d cov = rss / (n - 2) * xtx.inverse();
  return {beta[0], beta[1], 1 - rss / tss, std::sqrt(cov(0, 0))};
}

// omega_i = sqrt(omega0^2 + (i/N)^(2/d)), i = 1..N: P_c(omega_i) = i/N exactly.
FitInput power_law(double d, int n, double omega0 = 0.25) {
  FitInput in;
  in.omega0 = omega0;
  for (int i = 1; i <= n; ++i) in.frequencies.push_back(std::sqrt(omega0 * omega0 + std::pow(double(i) / n, 2 / d)));
  return in;
}

}  // namespace

TEST_CASE("student t quantile") {
  CHECK(student_t_quantile(0.5, 7) == 0);
  CHECK(student_t_quantile(0.975, std::numeric_limits<double>::infinity()) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(student_t_quantile(0.975, 1) == doctest::Approx(12.706204736174707).epsilon(1e-12));
  CHECK(student_t_quantile(0.975, 2) == doctest::Approx(4.302652729749464).epsilon(1e-12));
  CHECK(student_t_quantile(0.975, 10) == doctest::Approx(2.228138851986274).epsilon(1e-10));
  for (double nu : {3.0, 5.0, 10.0, 30.0, 200.0}) {
    for (double p : {0.6, 0.9, 0.975, 0.995}) {
      CAPTURE(nu);
      CAPTURE(p);
      const double q = student_t_quantile(p, nu);
      CHECK(std::abs(t_cdf_simpson(q, nu) - p) < 1e-9);
      CHECK(student_t_quantile(1 - p, nu) == doctest::Approx(-q).epsilon(1e-10));
    }
  }
  CHECK_THROWS_AS(student_t_quantile(0, 5), Error);
  CHECK_THROWS_AS(student_t_quantile(0.5, 0.5), Error);
}

TEST_CASE("ols matches the normal equations") {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> noise(0, 0.3);
  std::uniform_real_distribution<double> unif(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + trial % 48;
    Eigen::VectorXd x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = unif(gen);
      y[i] = 0.7 * x[i] - 1.2 + noise(gen);
    }
    const auto fit = ols_fit(x, y, n);
    const auto ref = normal_equations(x, y);
    CHECK(std::abs(fit.slope - ref.slope) < 1e-10);
    CHECK(std::abs(fit.intercept - ref.intercept) < 1e-10);
    CHECK(std::abs(fit.r2 - ref.r2) < 1e-10);
    CHECK(std::abs(fit.slope_se - ref.se) < 1e-10);
  }
}

TEST_CASE("ols special cases") {
  Eigen::VectorXd x(5), y(5);
  x << 0, 1, 2, 3, 4;
  y = 1.5 * x.array() + 2;
  auto fit = ols_fit(x, y, 4);
  CHECK(fit.slope == doctest::Approx(1.5));
  CHECK(fit.intercept == doctest::Approx(2));
  CHECK(fit.r2 == doctest::Approx(1));
  CHECK(fit.slope_se < 1e-12);
  y.setConstant(3);
  fit = ols_fit(x, y, 5);
  CHECK(fit.slope == 0);
  CHECK(fit.r2 == 1);
  x.setConstant(2);
  try {
    ols_fit(x, y, 5);
    FAIL("expected singular design");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::singular_design);
  }
  CHECK_THROWS_AS(ols_fit(x, y, 2), Error);
}

TEST_CASE("shifting x leaves slope, R2 and SE unchanged") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> z;
  Eigen::VectorXd x(30), y(30);
  for (int i = 0; i < 30; ++i) {
    x[i] = -4 + 0.1 * i;
    y[i] = 0.9 * x[i] + 0.05 * z(gen);
  }
  for (double shift : {std::log(7.3), -12.0, 40.0}) {
    const Eigen::VectorXd xs = x.array() + shift;
    for (int k = 3; k <= 30; ++k) {
      const auto a = ols_fit(x, y, k);
      const auto b = ols_fit(xs, y, k);
      CHECK(std::abs(a.slope - b.slope) < 1e-9);
      CHECK(std::abs(a.r2 - b.r2) < 1e-9);
      CHECK(std::abs(a.slope_se - b.slope_se) < 1e-9);
    }
  }
}

TEST_CASE("log-log points") {
  FitInput in;
  in.frequencies = {1, 2, 2, 3};
  in.min_points = 2;
  const auto pts = make_loglog_points(in);
  REQUIRE(pts.size() == 2);
  CHECK(pts.x[0] == doctest::Approx(std::log(3.0)));
  CHECK(pts.y[0] == doctest::Approx(std::log(0.75)));
  CHECK(pts.x[1] == doctest::Approx(std::log(8.0)));
  CHECK(pts.y[1] == 0);
  CHECK(pts.total == 4);

  // Near-degenerate values group as one.
  in.frequencies = {1, 2, 2 * (1 + 1e-13), 3};
  CHECK(make_loglog_points(in).size() == 2);

  in.min_points = 3;
  try {
    make_loglog_points(in);
    FAIL("expected insufficient data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::insufficient_data);
  }
  in.frequencies = {2, 1, 3};
  CHECK_THROWS_AS(make_loglog_points(in), Error);
  in.frequencies = {1, 2, 3};
  in.omega0 = 1.5;
  CHECK_THROWS_AS(make_loglog_points(in), Error);
}

TEST_CASE("exact power law is recovered") {
  for (double d : {1.5, 2.0, 2.5, 3.0, 4.0}) {
    const auto est = analyze(power_law(d, 400));
    CHECK(std::abs(est.best.d_s - d) < 1e-6);
    CHECK(est.best.r2 >= 1 - 1e-9);
    CHECK(est.best.ci_high - est.best.ci_low < 1e-6);
    CHECK(est.best.ci_low <= est.best.d_s);
    CHECK(est.best.d_s <= est.best.ci_high);
    const auto full = ols_fit(est.points.x, est.points.y, est.points.size() - 1);
    CHECK(std::abs(full.slope - d / 2) < 1e-9);
  }
}

TEST_CASE("scan picks the best score, smallest k on ties") {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> z;
  FitInput in = power_law(2, 200);
  for (std::size_t i = 100; i < in.frequencies.size(); ++i) in.frequencies[i] *= 1 + 0.02 * (i - 100) / 100.0;
  std::sort(in.frequencies.begin(), in.frequencies.end());
  for (auto criterion : {Criterion::r_squared, Criterion::adjusted_r_squared, Criterion::aic, Criterion::aicc,
                         Criterion::bic}) {
    const auto est = analyze(in, 0.05, criterion);
    double best = -std::numeric_limits<double>::infinity();
    int k = 0;
    for (const auto& row : est.scan)
      if (row.score > best) {
        best = row.score;
        k = row.cutoff_index;
      }
    CHECK(est.best.cutoff_index == k);
    CHECK(est.scan.front().cutoff_index == in.min_points);
    CHECK(est.scan.back().cutoff_index == est.points.size());
    CHECK(parse_criterion(to_string(criterion)) == criterion);
  }
  CHECK_THROWS_AS(parse_criterion("r3"), Error);
}

TEST_CASE("confidence interval uses t(1 - alpha/2, k - 2)") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> z;
  FitInput in = power_law(2, 60);
  for (auto& f : in.frequencies) f *= 1 + 1e-3 * std::abs(z(gen));
  std::sort(in.frequencies.begin(), in.frequencies.end());
  in.omega0.reset();
  const auto est = analyze(in, 0.1);
  for (const auto& row : est.scan) {
    const double half = student_t_quantile(0.95, row.cutoff_index - 2) * 2 * row.fit.slope_se;
    CHECK(row.ci_high - row.d_s == doctest::Approx(half));
    CHECK(row.d_s - row.ci_low == doctest::Approx(half));
  }
}

TEST_CASE("perturb") {
  std::vector<double> f;
  for (int i = 0; i < 500; ++i) f.push_back(0.25 + 0.001 * i);
  CHECK(perturb(f, {0, 0, 9}) == f);

  const auto dropped = perturb(f, {0.3, 0, 9});
  CHECK(dropped.size() < f.size());
  CHECK(std::abs(double(dropped.size()) / f.size() - 0.7) < 0.07);
  CHECK(std::includes(f.begin(), f.end(), dropped.begin(), dropped.end()));
  CHECK(perturb(f, {0.3, 0, 9}) == dropped);
  CHECK(perturb(f, {0.3, 0, 10}) != dropped);

  const auto noisy = perturb(f, {0, 0.05, 4});
  CHECK(std::is_sorted(noisy.begin(), noisy.end()));
  CHECK(noisy.size() == f.size());
  CHECK(noisy.front() >= f.front() * 0.95);
  CHECK(noisy.back() <= f.back() * 1.05);

  const auto offset = perturb(f, {0, 0.05, 4, NoiseReference::mode_offset});
  CHECK(offset.front() == f.front());
  CHECK(parse_noise_reference("mode_offset") == NoiseReference::mode_offset);

  try {
    perturb(std::vector<double>{1.0}, {0.999999, 0, 1});
    FAIL("expected empty output");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_output);
  }
  CHECK_THROWS_AS(perturb(f, {1.0, 0, 1}), Error);
  CHECK_THROWS_AS(perturb(f, {0, -0.1, 1}), Error);
}

TEST_CASE("scan and points CSV") {
  const auto est = analyze(power_law(3, 50));
  std::stringstream scan, points;
  write_scan_csv(scan, est.scan);
  write_points_csv(points, est.points, est.scan.back().fit);
  const auto s = csv::read(scan);
  CHECK(s.header == std::vector<std::string>{"cutoff_index", "cutoff_freq", "d_s", "ci_low", "ci_high", "r2"});
  CHECK(s.rows.size() == est.scan.size());
  const auto p = csv::read(points);
  CHECK(p.header == std::vector<std::string>{"x", "y", "fitted_y"});
  CHECK(static_cast<int>(p.rows.size()) == est.points.size());
}
