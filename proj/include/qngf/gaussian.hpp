#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "qngf/error.hpp"
#include "qngf/spectral.hpp"

// Units: hbar = k_B = 1, unit masses. Phase-space ordering throughout is
// X = (Q_1..Q_N, q_s, P_1..P_N, p_s): network normal modes, then the probe.

namespace qngf {

template <typename Scalar>
struct ProbeConfig {
  Scalar frequency = 1;
  Scalar squeezing = 0;
  Vector<Scalar> coupling;  // k, one non-negative entry per network node
};

/// Network plus probe as one quadratic Hamiltonian
/// H = p^T p / 2 + x^T M x, with x = (Q, q_s).
template <typename Scalar>
struct TotalSystem {
  Vector<Scalar> network_frequencies;
  Vector<Scalar> mode_coupling;  // g = U^T k
  Scalar probe_frequency = 0;
  Matrix<Scalar> quadratic_form;    // M, (N+1) x (N+1)
  Vector<Scalar> eigenfrequencies;  // Omega = sqrt(eig(2M)), ascending
  Matrix<Scalar> transform;         // O, columns are eigenvectors of M

  Eigen::Index modes() const { return quadratic_form.rows(); }
  Eigen::Index probe_index() const { return modes() - 1; }
};

/// Assembles M in the network normal-mode basis and diagonalises it.
/// Throws coupling_too_strong when M is not positive definite.
template <typename Scalar>
TotalSystem<Scalar> build_total(const Vector<Scalar>& frequencies, const Matrix<Scalar>& eigenvectors,
                                const ProbeConfig<Scalar>& probe) {
  const Eigen::Index n = frequencies.size();
  require(eigenvectors.rows() == n && eigenvectors.cols() == n, ErrorKind::invalid_input,
          "eigenvector matrix does not match the number of frequencies");
  require(probe.coupling.size() == n, ErrorKind::invalid_input, "coupling vector length must equal N");
  require(probe.frequency > 0, ErrorKind::invalid_parameter, "probe frequency must be > 0");
  require(probe.coupling.size() == 0 || probe.coupling.minCoeff() >= 0, ErrorKind::invalid_parameter,
          "couplings must be non-negative");

  TotalSystem<Scalar> total;
  total.network_frequencies = frequencies;
  total.probe_frequency = probe.frequency;
  total.mode_coupling = eigenvectors.transpose() * probe.coupling;

  Matrix<Scalar>& m = total.quadratic_form;
  m = Matrix<Scalar>::Zero(n + 1, n + 1);
  m.diagonal().head(n) = frequencies.cwiseAbs2() / Scalar(2);
  m(n, n) = probe.frequency * probe.frequency / Scalar(2);
  m.col(n).head(n) = -total.mode_coupling / Scalar(2);
  m.row(n).head(n) = -total.mode_coupling.transpose() / Scalar(2);

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalFailure("total-system eigensolver did not converge", std::nan(""));
  if (!(solver.eigenvalues().minCoeff() > Scalar(1e-12)))
    fail(ErrorKind::coupling_too_strong, "probe coupling makes the total Hamiltonian indefinite");
  total.eigenfrequencies = (Scalar(2) * solver.eigenvalues()).cwiseSqrt();
  total.transform = solver.eigenvectors();
  fix_column_signs(total.transform);
  return total;
}

template <typename Scalar>
TotalSystem<Scalar> build_total(const SpectrumData<Scalar>& spectrum, const ProbeConfig<Scalar>& probe) {
  require(spectrum.has_eigenvectors(), ErrorKind::invalid_input, "spectrum was built without eigenvectors");
  return build_total(spectrum.frequencies, spectrum.eigenvectors, probe);
}

/// J = [[0, I], [-I, 0]] for `modes` modes.
template <typename Scalar>
Matrix<Scalar> symplectic_form(Eigen::Index modes) {
  Matrix<Scalar> j = Matrix<Scalar>::Zero(2 * modes, 2 * modes);
  j.topRightCorner(modes, modes).setIdentity();
  j.bottomLeftCorner(modes, modes) = -Matrix<Scalar>::Identity(modes, modes);
  return j;
}

/// S(t) = (O+O) S_diag(t) (O+O)^T, with S_diag the free propagation of
/// oscillators at the total eigenfrequencies.
template <typename Scalar>
Matrix<Scalar> propagator(const TotalSystem<Scalar>& total, Scalar t) {
  require(t >= 0, ErrorKind::invalid_parameter, "time must be >= 0");
  const Eigen::Index n = total.modes();
  const auto& o = total.transform;
  const auto& w = total.eigenfrequencies.array();
  const Vector<Scalar> c = (w * t).cos().matrix();
  const Vector<Scalar> s = (w * t).sin().matrix();

  Matrix<Scalar> out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = o * c.asDiagonal() * o.transpose();
  out.topRightCorner(n, n) = o * (s.array() / w).matrix().asDiagonal() * o.transpose();
  out.bottomLeftCorner(n, n) = -(o * (s.array() * w).matrix().asDiagonal() * o.transpose());
  out.bottomRightCorner(n, n) = out.topLeftCorner(n, n);
  return out;
}

/// The two rows of S(t) that produce q_s and p_s; O(n^2) instead of O(n^3).
template <typename Scalar>
Matrix<Scalar> probe_propagator_rows(const TotalSystem<Scalar>& total, Scalar t) {
  const Eigen::Index n = total.modes();
  const auto& o = total.transform;
  const auto& w = total.eigenfrequencies.array();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> probe_row = o.row(total.probe_index()).transpose().array();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> c = (w * t).cos();
  const Eigen::Array<Scalar, Eigen::Dynamic, 1> s = (w * t).sin();

  Matrix<Scalar> rows(2, 2 * n);
  rows.row(0).head(n) = o * (probe_row * c).matrix();
  rows.row(0).tail(n) = o * (probe_row * s / w).matrix();
  rows.row(1).head(n) = -(o * (probe_row * s * w).matrix());
  rows.row(1).tail(n) = rows.row(0).head(n);
  return rows;
}

/// Zero-mean Gaussian state, described by its covariance matrix.
template <typename Scalar>
struct GaussianState {
  Matrix<Scalar> covariance;

  Eigen::Index modes() const { return covariance.rows() / 2; }
};

/// Thermal state of the network normal modes as a 2N x 2N diagonal block
/// (Q variances, then P variances). T = 0 is the vacuum.
template <typename Scalar>
Matrix<Scalar> thermal_network_state(const Vector<Scalar>& frequencies, Scalar temperature) {
  require(temperature >= 0, ErrorKind::invalid_parameter, "temperature must be >= 0");
  const Eigen::Index n = frequencies.size();
  Matrix<Scalar> block = Matrix<Scalar>::Zero(2 * n, 2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar w = frequencies[i];
    require(w > 0, ErrorKind::invalid_parameter, "mode frequencies must be > 0");
    const Scalar occupation = temperature > 0 ? Scalar(1) / std::expm1(w / temperature) : Scalar(0);
    block(i, i) = (2 * occupation + 1) / (2 * w);
    block(n + i, n + i) = w * (2 * occupation + 1) / 2;
  }
  return block;
}

/// Momentum-squeezed thermal probe: <q^2> = (2n+1) e^{2r} / (2w),
/// <p^2> = (2n+1) w e^{-2r} / 2. n = 0 gives squeezed vacuum.
template <typename Scalar>
Matrix<Scalar> squeezed_probe_state(Scalar frequency, Scalar squeezing, Scalar thermal_excitations = 0) {
  require(frequency > 0, ErrorKind::invalid_parameter, "probe frequency must be > 0");
  require(squeezing >= 0, ErrorKind::invalid_parameter, "squeezing must be >= 0");
  require(thermal_excitations >= 0, ErrorKind::invalid_parameter, "thermal excitations must be >= 0");
  Matrix<Scalar> block = Matrix<Scalar>::Zero(2, 2);
  const Scalar spread = 2 * thermal_excitations + 1;
  block(0, 0) = spread * std::exp(2 * squeezing) / (2 * frequency);
  block(1, 1) = spread * frequency * std::exp(-2 * squeezing) / 2;
  return block;
}

/// Places a network block (2N x 2N) and a probe block (2 x 2) into the
/// (Q, q_s, P, p_s) ordering. Network-probe correlations start at zero.
template <typename Scalar>
GaussianState<Scalar> compose_state(const Matrix<Scalar>& network, const Matrix<Scalar>& probe) {
  require(network.rows() == network.cols() && network.rows() % 2 == 0 && probe.rows() == 2 && probe.cols() == 2,
          ErrorKind::invalid_input, "state blocks have the wrong shape");
  const Eigen::Index n = network.rows() / 2;
  GaussianState<Scalar> state;
  auto& s = state.covariance;
  s = Matrix<Scalar>::Zero(2 * n + 2, 2 * n + 2);
  // Network rows/cols map i -> i and n + i -> n + 1 + i.
  s.topLeftCorner(n, n) = network.topLeftCorner(n, n);
  s.block(0, n + 1, n, n) = network.topRightCorner(n, n);
  s.block(n + 1, 0, n, n) = network.bottomLeftCorner(n, n);
  s.block(n + 1, n + 1, n, n) = network.bottomRightCorner(n, n);
  s(n, n) = probe(0, 0);
  s(n, 2 * n + 1) = probe(0, 1);
  s(2 * n + 1, n) = probe(1, 0);
  s(2 * n + 1, 2 * n + 1) = probe(1, 1);
  return state;
}

/// sigma' = S sigma S^T, re-symmetrised.
template <typename Scalar>
GaussianState<Scalar> evolve(const GaussianState<Scalar>& state, const Matrix<Scalar>& s) {
  require(s.rows() == state.covariance.rows() && s.cols() == state.covariance.cols(), ErrorKind::invalid_input,
          "propagator and state dimensions differ");
  GaussianState<Scalar> out;
  out.covariance.noalias() = s * state.covariance * s.transpose();
  out.covariance = (out.covariance + out.covariance.transpose()).eval() / Scalar(2);
  return out;
}

inline constexpr double kPhysicalityTolerance = 1e-9;

/// <a^dagger a> = (w/2) <q_s^2> + <p_s^2> / (2w) - 1/2.
template <typename Scalar>
Scalar probe_excitations(Scalar q_variance, Scalar p_variance, Scalar frequency) {
  const Scalar n = frequency / 2 * q_variance + p_variance / (2 * frequency) - Scalar(0.5);
  if (n < Scalar(-kPhysicalityTolerance))
    fail(ErrorKind::physicality_violation, "negative probe excitation number " + std::to_string(double(n)));
  return std::max(n, Scalar(0));
}

template <typename Scalar>
Scalar probe_excitations(const GaussianState<Scalar>& state, Scalar frequency) {
  const Eigen::Index n = state.modes();
  return probe_excitations(state.covariance(n - 1, n - 1), state.covariance(2 * n - 1, 2 * n - 1), frequency);
}

/// Probe excitations after time t without forming the full propagator.
template <typename Scalar>
Scalar probe_excitations_at(const TotalSystem<Scalar>& total, const GaussianState<Scalar>& initial, Scalar t) {
  const Matrix<Scalar> rows = probe_propagator_rows(total, t);
  const Matrix<Scalar> moments = rows * initial.covariance * rows.transpose();
  return probe_excitations(moments(0, 0), moments(1, 1), total.probe_frequency);
}

/// <H_tot> = tr(sigma_pp) / 2 + tr(M sigma_xx) for zero means.
template <typename Scalar>
Scalar total_energy(const TotalSystem<Scalar>& total, const GaussianState<Scalar>& state) {
  const Eigen::Index n = total.modes();
  const auto& s = state.covariance;
  return s.bottomRightCorner(n, n).trace() / 2 + (total.quadratic_form * s.topLeftCorner(n, n)).trace();
}

/// Symplectic eigenvalues, ascending: the positive eigenvalues of
/// sigma^{1/2} (iJ) sigma^{1/2}. A physical state has all of them >= 1/2.
template <typename Scalar>
Vector<Scalar> symplectic_eigenvalues(const GaussianState<Scalar>& state) {
  using Complex = std::complex<Scalar>;
  using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = state.modes();
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> root(state.covariance);
  const Matrix<Scalar> sqrt_sigma = root.operatorSqrt();
  const ComplexMatrix ij = Complex(0, 1) * symplectic_form<Scalar>(n).template cast<Complex>();
  const ComplexMatrix h = sqrt_sigma.template cast<Complex>() * ij * sqrt_sigma.template cast<Complex>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().tail(n);
}

}  // namespace qngf
