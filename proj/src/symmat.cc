#include "fintime/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace fintime {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "symmetric matrix must be square with n >= 1, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

Vector SymMatrix::operator*(const Vector& v) const {
  if (v.size() != dim()) throw DimensionError("matrix-vector dimension mismatch");
  return m_ * v;
}

namespace {

double off_diagonal_norm(const Matrix& a) {
  double sum = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

// One Jacobi rotation annihilating a(p,q); accumulates into v.
void rotate(Matrix& a, Matrix& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

bool is_nonnegative_integer(double r) { return r >= 0.0 && std::floor(r) == r; }

void check_power_allowed(const EigenDecomp& eig, double r, double floor) {
  if (is_nonnegative_integer(r)) return;
  const double lmin = eig.eigenvalues(0);
  if (!(lmin > floor)) {
    std::ostringstream os;
    os << "power " << r << " requires eigenvalues above " << floor << ", smallest is " << lmin;
    throw NotPositiveDefinite(os.str());
  }
}

Vector powered_eigenvalues(const EigenDecomp& eig, double r) {
  return eig.eigenvalues.unaryExpr([r](double l) { return std::pow(l, r); });
}

}  // namespace

EigenDecomp sym_eig(const SymMatrix& m) {
  const Matrix& input = m.matrix();
  if (!input.allFinite()) throw InvalidMatrix("matrix has non-finite entries");

  const Eigen::Index n = m.dim();
  Matrix a = input;
  Matrix v = Matrix::Identity(n, n);

  const double scale = a.norm();
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off <= std::numeric_limits<double>::epsilon() * scale * 1e-2) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
        } else if (a(p, q) != 0.0) {
          rotate(a, v, p, q);
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });

  EigenDecomp out{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<size_t>(k)];
    out.eigenvalues(k) = a(src, src);
    Eigen::VectorXd col = v.col(src);
    col /= col.norm();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-14) {
        if (col(i) < 0.0) col = -col;
        break;
      }
    }
    out.basis.col(k) = col;
  }
  return out;
}

SymMatrix mat_power(const EigenDecomp& eig, double r, double floor) {
  check_power_allowed(eig, r, floor);
  const Vector lr = powered_eigenvalues(eig, r);
  return SymMatrix(eig.basis * lr.asDiagonal() * eig.basis.transpose());
}

SymMatrix mat_power(const SymMatrix& m, double r, double floor) {
  return mat_power(sym_eig(m), r, floor);
}

Vector apply_power(const EigenDecomp& eig, double r, const Vector& v, double floor) {
  if (v.size() != eig.eigenvalues.size()) {
    std::ostringstream os;
    os << "vector of length " << v.size() << " against matrix of dimension "
       << eig.eigenvalues.size();
    throw DimensionError(os.str());
  }
  check_power_allowed(eig, r, floor);
  const Vector coeffs = eig.basis.transpose() * v;
  return eig.basis * powered_eigenvalues(eig, r).cwiseProduct(coeffs);
}

Vector apply_power(const SymMatrix& m, double r, const Vector& v, double floor) {
  if (v.size() != m.dim()) {
    std::ostringstream os;
    os << "vector of length " << v.size() << " against matrix of dimension " << m.dim();
    throw DimensionError(os.str());
  }
  return apply_power(sym_eig(m), r, v, floor);
}

double min_eigenvalue(const SymMatrix& m) { return sym_eig(m).eigenvalues(0); }

}  // namespace fintime
