#pragma once

#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qngf/error.hpp"

namespace qngf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// L = diag(degrees) - A, computed in the adjacency's own scalar type so an
/// integer adjacency yields exactly zero row sums.
template <typename Derived>
Matrix<typename Derived::Scalar> laplacian(const Eigen::MatrixBase<Derived>& adjacency) {
  using Scalar = typename Derived::Scalar;
  require(adjacency.rows() == adjacency.cols(), ErrorKind::invalid_input, "adjacency must be square");
  require(adjacency == adjacency.transpose(), ErrorKind::invalid_input, "adjacency must be symmetric");
  require(adjacency.diagonal().isZero(), ErrorKind::invalid_input, "adjacency must have a zero diagonal");
  Matrix<Scalar> l = -adjacency;
  l.diagonal() = adjacency.rowwise().sum();
  return l;
}

/// Number of connected components of the graph behind a 0/1 adjacency.
template <typename Derived>
int connected_components(const Eigen::MatrixBase<Derived>& adjacency) {
  const Eigen::Index n = adjacency.rows();
  std::vector<int> label(n, -1);
  std::vector<Eigen::Index> stack;
  int components = 0;
  for (Eigen::Index root = 0; root < n; ++root) {
    if (label[root] >= 0) continue;
    label[root] = components;
    stack.push_back(root);
    while (!stack.empty()) {
      const Eigen::Index v = stack.back();
      stack.pop_back();
      for (Eigen::Index u = 0; u < n; ++u)
        if (adjacency(v, u) != 0 && label[u] < 0) {
          label[u] = components;
          stack.push_back(u);
        }
    }
    ++components;
  }
  return components;
}

/// Flips each column so its largest-magnitude entry is positive (first such
/// entry on exact ties).
template <typename Derived>
void fix_column_signs(Eigen::MatrixBase<Derived>& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index at = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&at);
    if (vectors(at, c) < 0) vectors.col(c) = -vectors.col(c);
  }
}

template <typename Scalar>
struct EigenPairs {
  Vector<Scalar> values;   // ascending
  Matrix<Scalar> vectors;  // columns paired with values
  Scalar residual = 0;     // max-abs of L*U - U*diag(values)
  Scalar norm = 0;         // spectral norm of L
};

inline constexpr double kEigenResidualTolerance = 1e-9;

/// Relative residual bound for a scalar type: 1e-9 in double precision,
/// loosened to 1e4 epsilon for narrower types.
template <typename Scalar>
constexpr Scalar residual_tolerance() {
  return std::max(Scalar(kEigenResidualTolerance), Scalar(1e4) * Eigen::NumTraits<Scalar>::epsilon());
}

/// Dense symmetric eigendecomposition with a residual check against
/// residual_tolerance<Scalar>() * ||L||.
template <typename Derived>
EigenPairs<typename Derived::Scalar> eigendecompose(const Eigen::MatrixBase<Derived>& symmetric) {
  using Scalar = typename Derived::Scalar;
  static_assert(!Eigen::NumTraits<Scalar>::IsInteger, "cast integer matrices before eigendecompose");
  require(symmetric.rows() == symmetric.cols(), ErrorKind::invalid_input, "matrix must be square");

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(symmetric);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigensolver did not converge", std::nan(""));

  EigenPairs<Scalar> out;
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  fix_column_signs(out.vectors);
  out.norm = out.values.size() ? out.values.cwiseAbs().maxCoeff() : Scalar(0);
  out.residual = out.values.size()
                     ? (symmetric * out.vectors - out.vectors * out.values.asDiagonal()).cwiseAbs().maxCoeff()
                     : Scalar(0);
  if (out.residual > residual_tolerance<Scalar>() * out.norm)
    throw NumericalFailure("eigen residual " + std::to_string(double(out.residual)) + " exceeds tolerance",
                           double(out.residual));
  return out;
}

/// Ascending eigenvalues only; the cheap path for large spectra.
template <typename Derived>
Vector<typename Derived::Scalar> eigenvalues(const Eigen::MatrixBase<Derived>& symmetric) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("symmetric eigensolver did not converge", std::nan(""));
  return solver.eigenvalues();
}

/// Sets |lambda| < tolerance * max|lambda| to exactly zero.
template <typename Derived>
void clamp_zero_eigenvalues(Eigen::MatrixBase<Derived>& values, double tolerance = kEigenResidualTolerance) {
  using Scalar = typename Derived::Scalar;
  if (values.size() == 0) return;
  const Scalar cut = Scalar(tolerance) * values.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (std::abs(values[i]) < cut) values[i] = Scalar(0);
}

/// omega_i = sqrt(omega0^2 + g * lambda_i).
template <typename Derived>
Vector<typename Derived::Scalar> mode_frequencies(const Eigen::MatrixBase<Derived>& lambda,
                                                  typename Derived::Scalar omega0,
                                                  typename Derived::Scalar coupling) {
  using Scalar = typename Derived::Scalar;
  require(omega0 > 0, ErrorKind::invalid_parameter, "bare frequency omega0 must be > 0");
  require(coupling > 0, ErrorKind::invalid_parameter, "coupling g must be > 0");
  require(lambda.size() == 0 || lambda.minCoeff() >= Scalar(0), ErrorKind::invalid_parameter,
          "Laplacian eigenvalues must be non-negative");
  return (Vector<Scalar>::Constant(lambda.size(), omega0 * omega0) + coupling * lambda).cwiseSqrt();
}

/// Inverse of mode_frequencies: lambda_i = (omega_i^2 - omega0^2) / g.
template <typename Derived>
Vector<typename Derived::Scalar> laplacian_eigenvalues_from(const Eigen::MatrixBase<Derived>& omega,
                                                            typename Derived::Scalar omega0,
                                                            typename Derived::Scalar coupling) {
  return (omega.cwiseAbs2().array() - omega0 * omega0).matrix() / coupling;
}

/// Laplacian spectrum plus the oscillator frequencies it induces.
template <typename Scalar>
struct SpectrumData {
  Vector<Scalar> eigenvalues;
  Matrix<Scalar> eigenvectors;  // empty when built eigenvalues-only
  Scalar omega0 = 0;
  Scalar coupling = 0;
  Vector<Scalar> frequencies;

  Eigen::Index size() const { return eigenvalues.size(); }
  bool has_eigenvectors() const { return eigenvectors.size() != 0; }
};

/// Builds the spectrum of a Laplacian. Near-zero eigenvalues are clamped to
/// exactly zero, so frequencies[0] == omega0 on a connected graph.
template <typename Derived>
SpectrumData<typename Derived::Scalar> make_spectrum(const Eigen::MatrixBase<Derived>& lap,
                                                     typename Derived::Scalar omega0,
                                                     typename Derived::Scalar coupling,
                                                     bool with_eigenvectors = true) {
  using Scalar = typename Derived::Scalar;
  SpectrumData<Scalar> s;
  s.omega0 = omega0;
  s.coupling = coupling;
  if (with_eigenvectors) {
    auto pairs = eigendecompose(lap);
    s.eigenvalues = std::move(pairs.values);
    s.eigenvectors = std::move(pairs.vectors);
  } else {
    s.eigenvalues = eigenvalues(lap);
  }
  clamp_zero_eigenvalues(s.eigenvalues);
  s.frequencies = mode_frequencies(s.eigenvalues, omega0, coupling);
  return s;
}

struct CumulativePoint {
  double value;
  double fraction;
};

/// Right-continuous empirical cumulative: fraction of values <= v at each
/// distinct v. Input must be sorted ascending.
std::vector<CumulativePoint> cumulative(const std::vector<double>& sorted_values);

/// CSV with columns index,lambda,omega (1-based index).
void write_spectrum_csv(std::ostream& out, const SpectrumData<double>& spectrum);

}  // namespace qngf
