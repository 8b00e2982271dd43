#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "qngf/error.hpp"

namespace qngf {

struct FitInput {
  std::vector<double> frequencies;
  /// Bare frequency; the smallest input frequency when unset.
  std::optional<double> omega0;
  int min_points = 10;
  /// Frequencies within this relative distance of each other count as one
  /// value of the cumulative (degenerate modes rarely come out bit-equal).
  double tie_tolerance = 1e-10;
};

/// Log-log transform of the frequency cumulative:
/// x = log(omega^2 - omega0^2), y = log(P_c(omega)), sorted by x.
struct LogLogPoints {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  std::vector<double> frequency;  // the omega behind each point
  double omega0 = 0;
  int total = 0;  // size of the input list (P_c denominator)

  int size() const { return static_cast<int>(x.size()); }
};

LogLogPoints make_loglog_points(const FitInput& input);

template <typename Scalar>
struct OlsFit {
  Scalar slope = 0;
  Scalar intercept = 0;
  Scalar r2 = 0;
  Scalar slope_se = 0;
  Scalar rss = 0;
  int n = 0;
};

/// Unweighted least squares y = slope*x + intercept over the first k points.
///
/// This is the pseudoinverse solution written in centred form, which keeps
/// slope and R^2 invariant (to rounding) under a constant shift of x.
/// R^2 = sum (f - ybar)^2 / sum (y - ybar)^2, taken as 1 when y has no
/// variance. SE(slope)^2 = [RSS/(k-2)] / Sxx, the slope entry of
/// sigma^2 (X^T X)^-1.
template <typename DerivedX, typename DerivedY>
OlsFit<typename DerivedX::Scalar> ols_fit(const Eigen::MatrixBase<DerivedX>& x_all,
                                          const Eigen::MatrixBase<DerivedY>& y_all, Eigen::Index k) {
  using Scalar = typename DerivedX::Scalar;
  require(x_all.size() == y_all.size(), ErrorKind::invalid_input, "x and y lengths differ");
  require(k >= 3 && k <= x_all.size(), ErrorKind::invalid_parameter,
          "cutoff must satisfy 3 <= k <= number of points");
  const auto x = x_all.head(k).array();
  const auto y = y_all.head(k).array();
  const Scalar xbar = x.mean();
  const Scalar ybar = y.mean();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> xc = x - xbar;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> yc = y - ybar;
  const Scalar sxx = xc.square().sum();
  const Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(x.abs().maxCoeff(), Scalar(1));
  if (!(sxx > Scalar(k) * noise * noise))
    fail(ErrorKind::singular_design, "singular design: all x values are equal");

  OlsFit<Scalar> fit;
  fit.n = static_cast<int>(k);
  fit.slope = (xc * yc).sum() / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> fitted_c = fit.slope * xc;
  const Scalar explained = fitted_c.square().sum();
  const Scalar total = yc.square().sum();
  fit.rss = (yc - fitted_c).square().sum();
  fit.r2 = total > Scalar(0) ? explained / total : Scalar(1);
  fit.slope_se = std::sqrt(fit.rss / Scalar(k - 2) / sxx);
  return fit;
}

/// Cutoff-selection criterion. R^2 and adjusted R^2 are maximised; the
/// information criteria are minimised.
enum class Criterion { r_squared, adjusted_r_squared, aic, aicc, bic };

Criterion parse_criterion(const std::string& name);
std::string to_string(Criterion criterion);

/// Criterion value for a fit, oriented so that larger is better.
double criterion_score(const OlsFit<double>& fit, Criterion criterion);

/// Inverse CDF of Student's t distribution. dof may be +infinity.
double student_t_quantile(double prob, double dof);

struct ScanRow {
  int cutoff_index = 0;  // number of fitted points
  double cutoff_frequency = 0;
  double d_s = 0;
  double ci_low = 0;
  double ci_high = 0;
  double r2 = 0;
  double score = 0;
  OlsFit<double> fit;
};

/// One fit per cutoff k = min_points .. points.size().
std::vector<ScanRow> scan_cutoffs(const LogLogPoints& points, int min_points, double alpha = 0.05,
                                  Criterion criterion = Criterion::r_squared);

struct FitResult {
  double d_s = 0;
  double intercept = 0;
  int cutoff_index = 0;
  double cutoff_frequency = 0;
  double r2 = 0;
  double ci_low = 0;
  double ci_high = 0;
  int n = 0;
};

/// Full estimation run: points, the cutoff scan and the selected fit.
struct Estimate {
  LogLogPoints points;
  std::vector<ScanRow> scan;
  FitResult best;
};

/// Scans every cutoff and keeps the best-scoring one (smallest k on ties).
Estimate analyze(const FitInput& input, double alpha = 0.05, Criterion criterion = Criterion::r_squared);

inline FitResult estimate(const FitInput& input, double alpha = 0.05,
                          Criterion criterion = Criterion::r_squared) {
  return analyze(input, alpha, criterion).best;
}

/// How relative noise is applied by perturb().
enum class NoiseReference {
  /// omega -> omega * (1 + u)
  frequency,
  /// sqrt(omega^2 - omega0^2) -> sqrt(omega^2 - omega0^2) * (1 + u), with
  /// omega0 the smallest input frequency (which therefore stays exact)
  mode_offset,
};

NoiseReference parse_noise_reference(const std::string& name);
std::string to_string(NoiseReference reference);

struct PerturbationSpec {
  double missing_probability = 0;
  double relative_noise = 0;
  std::uint64_t seed = 1;
  NoiseReference reference = NoiseReference::frequency;
};

/// Drops each value with the missing probability, scales survivors by
/// (1 + u) with u uniform on [-noise, noise], and re-sorts.
std::vector<double> perturb(std::span<const double> frequencies, const PerturbationSpec& spec);

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& scan);
/// Columns x,y,fitted_y for every point, fitted_y from `fit`.
void write_points_csv(std::ostream& out, const LogLogPoints& points, const OlsFit<double>& fit);

}  // namespace qngf
