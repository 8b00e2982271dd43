#include <cmath>
#include <limits>
#include <numbers>

#include "qngf/estimator.hpp"

namespace qngf {
namespace {

// Continued fraction for the regularised incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(T > t) for t >= 0.
double t_upper_tail(double t, double dof) {
  return 0.5 * incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double t_density(double t, double dof) {
  const double log_norm = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
                          0.5 * std::log(dof * std::numbers::pi);
  return std::exp(log_norm - 0.5 * (dof + 1.0) * std::log1p(t * t / dof));
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

// Solves tail(x) = q on x >= 0 with Newton steps kept inside a bisection bracket.
template <typename Tail, typename Density>
double solve_upper_tail(double q, Tail tail, Density density) {
  double lo = 0.0;
  double hi = 1.0;
  while (tail(hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = tail(x) - q;
    if (f > 0) lo = x;
    else hi = x;
    const double slope = -density(x);
    double next = slope != 0.0 ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * std::max(1.0, hi)) {
      x = next;
      break;
    }
    x = next;
  }
  return x;
}

}  // namespace

double student_t_quantile(double prob, double dof) {
  require(prob > 0.0 && prob < 1.0, ErrorKind::invalid_parameter, "probability must lie in (0, 1)");
  require(dof >= 1.0, ErrorKind::invalid_parameter, "degrees of freedom must be >= 1");
  if (prob == 0.5) return 0.0;
  if (prob < 0.5) return -student_t_quantile(1.0 - prob, dof);
  const double q = 1.0 - prob;

  if (std::isinf(dof) || dof > 1e12)
    return solve_upper_tail(q, normal_upper_tail, normal_density);
  if (dof == 1.0) return std::tan(std::numbers::pi * (prob - 0.5));
  if (dof == 2.0) return (2.0 * prob - 1.0) / std::sqrt(2.0 * prob * (1.0 - prob));
  return solve_upper_tail(
      q, [dof](double t) { return t_upper_tail(t, dof); }, [dof](double t) { return t_density(t, dof); });
}

}  // namespace qngf
