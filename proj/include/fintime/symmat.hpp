#pragma once

#include <Eigen/Dense>

#include "fintime/errors.hpp"

namespace fintime {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Eigenvalues at or below this floor make fractional/negative powers illegal.
inline constexpr double kEigenvalueFloor = 1e-12;

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// averaging the input with its transpose, so entries(i,j) == entries(j,i)
/// holds bit-for-bit afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index n);
  static SymMatrix diagonal(const Vector& d);

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  Vector operator*(const Vector& v) const;

 private:
  Matrix m_;
};

/// Spectral factorization M = basis * diag(eigenvalues) * basis^T.
/// Eigenvalues are ascending; each column of basis has its first nonzero
/// component nonnegative.
struct EigenDecomp {
  Vector eigenvalues;
  Matrix basis;
};

/// Cyclic Jacobi eigensolver. Deterministic for a fixed input.
/// Throws InvalidMatrix on non-finite entries.
EigenDecomp sym_eig(const SymMatrix& m);

/// V diag(lambda_i^r) V^T. Any real r is accepted for SPD input; for
/// matrices with an eigenvalue <= kEigenvalueFloor only nonnegative integer
/// powers are allowed (NotPositiveDefinite otherwise).
SymMatrix mat_power(const SymMatrix& m, double r, double floor = kEigenvalueFloor);
SymMatrix mat_power(const EigenDecomp& eig, double r, double floor = kEigenvalueFloor);

/// M^r v without forming M^r.
Vector apply_power(const SymMatrix& m, double r, const Vector& v,
                   double floor = kEigenvalueFloor);
Vector apply_power(const EigenDecomp& eig, double r, const Vector& v,
                   double floor = kEigenvalueFloor);

double min_eigenvalue(const SymMatrix& m);

}  // namespace fintime
