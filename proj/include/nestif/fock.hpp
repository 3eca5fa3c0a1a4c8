#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>

#include "nestif/constants.hpp"
#include "nestif/errors.hpp"

// Truncated number-basis (|0>..|dim-1>) linear algebra for a single bosonic
// mode: ladder operators, coherent and single-quantum-added coherent states,
// displacement operators, quadratures.
//
// Truncation is never silent. State constructors measure the probability
// that would fall above the top basis level and refuse to construct when it
// exceeds kTailTolerance.

namespace nestif::fock {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kTailTolerance = 1e-8;

/// Rule-of-thumb truncation for a coherent amplitude gamma:
/// dim >= |g|^2 + 8|g| + 10 keeps the tail far below kTailTolerance.
inline int recommended_dim(Complex gamma) {
  const double g = std::abs(gamma);
  return static_cast<int>(std::ceil(g * g + 8.0 * g + 10.0));
}

/// Annihilation operator: <n-1|c|n> = sqrt(n).
inline Matrix annihilation(int dim) {
  if (dim < 2)
    throw Error("annihilation: dim must be >= 2, got " + std::to_string(dim));
  Matrix c = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) c(n - 1, n) = std::sqrt(double(n));
  return c;
}

inline Matrix creation(int dim) { return annihilation(dim).adjoint(); }

inline Matrix number_operator(int dim) {
  if (dim < 1) throw Error("number_operator: dim must be >= 1");
  Matrix n = Matrix::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = double(k);
  return n;
}

/// Coherent state |gamma>: amps[n] = e^{-|g|^2/2} g^n / sqrt(n!).
///
/// The amplitudes come from the ratio recurrence a_n = a_{n-1} g / sqrt(n),
/// then the vector is renormalized once the tail check has passed, so the
/// stored state is unit-norm to machine precision.
inline Vector coherent_state(Complex gamma, int dim) {
  if (dim < 1) throw Error("coherent_state: dim must be >= 1");
  Vector v(dim);
  v(0) = std::exp(-0.5 * std::norm(gamma));
  for (int n = 1; n < dim; ++n) v(n) = v(n - 1) * gamma / std::sqrt(double(n));
  const double tail = 1.0 - v.squaredNorm();
  if (tail > kTailTolerance)
    throw TruncationError(
        "coherent_state: truncation at dim=" + std::to_string(dim) +
            " drops tail mass " + std::to_string(tail) + " for |gamma|=" +
            std::to_string(std::abs(gamma)),
        tail);
  v.normalize();
  return v;
}

/// Single-quantum-added coherent state: c^dag|gamma> / sqrt(|gamma|^2 + 1).
/// amps[0] = 0 by construction; gamma = 0 reduces to |1>.
inline Vector added_coherent_state(Complex gamma, int dim) {
  if (dim < 2) throw Error("added_coherent_state: dim must be >= 2");
  Vector v(dim);
  v(0) = 0.0;
  const double norm = std::sqrt(std::norm(gamma) + 1.0);
  // coherent amplitude at level n-1, raised: a_n = c_{n-1} sqrt(n) / norm
  Complex coh = std::exp(Complex(-0.5 * std::norm(gamma), 0.0));
  for (int n = 1; n < dim; ++n) {
    v(n) = coh * std::sqrt(double(n)) / norm;
    coh *= gamma / std::sqrt(double(n));
  }
  const double tail = 1.0 - v.squaredNorm();
  if (tail > kTailTolerance)
    throw TruncationError(
        "added_coherent_state: truncation at dim=" + std::to_string(dim) +
            " drops tail mass " + std::to_string(tail),
        tail);
  v.normalize();
  return v;
}

/// Displacement operator D(eta) = exp(eta c^dag - eta* c), computed by
/// eigendecomposition of the Hermitian generator i(eta c^dag - eta* c).
/// Unitary on the well-populated subspace; the contract is the fidelity of
/// D(eta)|0> with |eta>, not the factorization method.
inline Matrix displacement(Complex eta, int dim) {
  if (dim < 2) throw Error("displacement: dim must be >= 2");
  const Matrix c = annihilation(dim);
  const Matrix a = eta * c.adjoint() - std::conj(eta) * c;  // anti-Hermitian
  Eigen::SelfAdjointEigenSolver<Matrix> es(Complex(0, 1) * a);
  if (es.info() != Eigen::Success)
    throw Error("displacement: eigendecomposition failed");
  Vector phases(dim);
  for (int k = 0; k < dim; ++k)
    phases(k) = std::exp(Complex(0, -es.eigenvalues()(k)));
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

/// Position quadrature x = x0 (c + c^dag), in meters when x0 is the
/// zero-point motion.
inline Matrix position_operator(int dim, double x0) {
  if (x0 <= 0.0) throw Error("position_operator: x0 must be positive");
  const Matrix c = annihilation(dim);
  return x0 * (c + Matrix(c.adjoint()));
}

/// Conjugate momentum p = i hbar/(2 x0) (c^dag - c); [x, p] = i hbar on the
/// interior of the truncated space.
inline Matrix momentum_operator(int dim, double x0) {
  if (x0 <= 0.0) throw Error("momentum_operator: x0 must be positive");
  const Matrix c = annihilation(dim);
  return Complex(0, 1) * (constants().hbar / (2.0 * x0)) *
         (Matrix(c.adjoint()) - c);
}

}  // namespace nestif::fock
