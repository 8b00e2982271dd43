#include "qngf/estimator.hpp"

#include <algorithm>
#include <ostream>

#include "qngf/csv.hpp"
#include "qngf/random.hpp"

namespace qngf {

LogLogPoints make_loglog_points(const FitInput& input) {
  const auto& f = input.frequencies;
  require(!f.empty(), ErrorKind::insufficient_data, "no frequencies to fit");
  require(input.min_points >= 1, ErrorKind::invalid_parameter, "minimum points must be >= 1");
  require(std::is_sorted(f.begin(), f.end()), ErrorKind::invalid_input, "frequencies must be sorted");
  require(f.front() > 0, ErrorKind::invalid_input, "frequencies must be positive");

  const double tol = input.tie_tolerance;
  const double omega0 = input.omega0.value_or(f.front());
  require(omega0 > 0 && omega0 <= f.front() * (1 + tol), ErrorKind::invalid_parameter,
          "omega0 must be positive and not exceed the smallest frequency");

  LogLogPoints out;
  out.omega0 = omega0;
  out.total = static_cast<int>(f.size());
  std::vector<double> xs, ys;
  const double n = static_cast<double>(f.size());
  for (std::size_t i = 0; i < f.size();) {
    std::size_t last = i;
    while (last + 1 < f.size() && f[last + 1] - f[last] <= tol * f[last + 1]) ++last;
    const double v = f[last];
    if (v - omega0 > tol * v) {
      xs.push_back(std::log((v - omega0) * (v + omega0)));
      ys.push_back(std::log(static_cast<double>(last + 1) / n));
      out.frequency.push_back(v);
    }
    i = last + 1;
  }
  require(static_cast<int>(xs.size()) >= input.min_points, ErrorKind::insufficient_data,
          "only " + std::to_string(xs.size()) + " usable points, need " + std::to_string(input.min_points));
  out.x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  out.y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return out;
}

Criterion parse_criterion(const std::string& name) {
  if (name == "r2") return Criterion::r_squared;
  if (name == "adjusted_r2") return Criterion::adjusted_r_squared;
  if (name == "aic") return Criterion::aic;
  if (name == "aicc") return Criterion::aicc;
  if (name == "bic") return Criterion::bic;
  fail(ErrorKind::invalid_parameter, "unknown criterion '" + name + "' (r2, adjusted_r2, aic, aicc, bic)");
}

std::string to_string(Criterion criterion) {
  switch (criterion) {
    case Criterion::r_squared: return "r2";
    case Criterion::adjusted_r_squared: return "adjusted_r2";
    case Criterion::aic: return "aic";
    case Criterion::aicc: return "aicc";
    case Criterion::bic: return "bic";
  }
  return "r2";
}

double criterion_score(const OlsFit<double>& fit, Criterion criterion) {
  constexpr double params = 2;
  const double n = fit.n;
  const double fit_term = n * std::log(fit.rss / n);
  switch (criterion) {
    case Criterion::r_squared: return fit.r2;
    case Criterion::adjusted_r_squared: return 1 - (1 - fit.r2) * (n - 1) / (n - params);
    case Criterion::aic: return -(fit_term + 2 * params);
    case Criterion::aicc: return -(fit_term + 2 * params + 2 * params * (params + 1) / (n - params - 1));
    case Criterion::bic: return -(fit_term + params * std::log(n));
  }
  return fit.r2;
}

std::vector<ScanRow> scan_cutoffs(const LogLogPoints& points, int min_points, double alpha, Criterion criterion) {
  require(alpha > 0 && alpha < 1, ErrorKind::invalid_parameter, "alpha must lie in (0, 1)");
  require(min_points >= 3, ErrorKind::invalid_parameter, "minimum points per fit must be >= 3");
  require(points.size() >= min_points, ErrorKind::insufficient_data, "fewer points than the minimum per fit");
  std::vector<ScanRow> scan;
  scan.reserve(points.size() - min_points + 1);
  for (int k = min_points; k <= points.size(); ++k) {
    ScanRow row;
    row.fit = ols_fit(points.x, points.y, k);
    row.cutoff_index = k;
    row.cutoff_frequency = points.frequency[k - 1];
    row.d_s = 2 * row.fit.slope;
    const double half = student_t_quantile(1 - alpha / 2, k - 2) * 2 * row.fit.slope_se;
    row.ci_low = row.d_s - half;
    row.ci_high = row.d_s + half;
    row.r2 = row.fit.r2;
    row.score = criterion_score(row.fit, criterion);
    scan.push_back(row);
  }
  return scan;
}

Estimate analyze(const FitInput& input, double alpha, Criterion criterion) {
  Estimate out;
  out.points = make_loglog_points(input);
  out.scan = scan_cutoffs(out.points, input.min_points, alpha, criterion);
  const ScanRow* best = &out.scan.front();
  for (const auto& row : out.scan)
    if (row.score > best->score) best = &row;
  out.best = {best->d_s,   best->fit.intercept, best->cutoff_index, best->cutoff_frequency,
              best->r2,    best->ci_low,        best->ci_high,      best->fit.n};
  return out;
}

NoiseReference parse_noise_reference(const std::string& name) {
  if (name == "frequency") return NoiseReference::frequency;
  if (name == "mode_offset") return NoiseReference::mode_offset;
  fail(ErrorKind::invalid_parameter, "unknown noise reference '" + name + "' (frequency, mode_offset)");
}

std::string to_string(NoiseReference reference) {
  return reference == NoiseReference::frequency ? "frequency" : "mode_offset";
}

std::vector<double> perturb(std::span<const double> frequencies, const PerturbationSpec& spec) {
  require(spec.missing_probability >= 0 && spec.missing_probability < 1, ErrorKind::invalid_parameter,
          "missing probability must lie in [0, 1)");
  require(spec.relative_noise >= 0, ErrorKind::invalid_parameter, "relative noise must be >= 0");
  const double omega0 =
      frequencies.empty() ? 0.0 : *std::min_element(frequencies.begin(), frequencies.end());

  Rng rng(spec.seed);
  std::vector<double> out;
  out.reserve(frequencies.size());
  for (double w : frequencies) {
    // Two variates per input value, used or not, so the streams stay aligned.
    const double drop = rng.uniform();
    const double u = spec.relative_noise * (2 * rng.uniform() - 1);
    if (drop < spec.missing_probability) continue;
    if (spec.reference == NoiseReference::frequency) {
      out.push_back(w * (1 + u));
    } else {
      const double offset = std::sqrt(std::max(0.0, (w - omega0) * (w + omega0))) * (1 + u);
      out.push_back(std::sqrt(omega0 * omega0 + offset * offset));
    }
  }
  require(!out.empty(), ErrorKind::empty_output, "perturbation dropped every frequency");
  std::sort(out.begin(), out.end());
  return out;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& scan) {
  csv::write_row(out, {"cutoff_index", "cutoff_freq", "d_s", "ci_low", "ci_high", "r2"});
  for (const auto& r : scan)
    csv::write_row(out, {std::to_string(r.cutoff_index), csv::format(r.cutoff_frequency), csv::format(r.d_s),
                         csv::format(r.ci_low), csv::format(r.ci_high), csv::format(r.r2)});
}

void write_points_csv(std::ostream& out, const LogLogPoints& points, const OlsFit<double>& fit) {
  csv::write_row(out, {"x", "y", "fitted_y"});
  for (int i = 0; i < points.size(); ++i)
    csv::write_row(out, {csv::format(points.x[i]), csv::format(points.y[i]),
                         csv::format(fit.slope * points.x[i] + fit.intercept)});
}

}  // namespace qngf
