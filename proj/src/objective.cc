#include "fintime/objective.hpp"

#include <cmath>
#include <sstream>

namespace fintime {

namespace {

void check_dim(const Vector& x, Eigen::Index dim) {
  if (x.size() != dim) {
    std::ostringstream os;
    os << "point has dimension " << x.size() << ", objective expects " << dim;
    throw DimensionError(os.str());
  }
}

}  // namespace

Objective rosenbrock(const RosenbrockParams& params) {
  const double a = params.a;
  const double b = params.b;
  if (!std::isfinite(a) || !std::isfinite(b)) throw ConfigError("rosenbrock parameters must be finite");

  Objective obj;
  {
    std::ostringstream os;
    os << "rosenbrock(a=" << a << ",b=" << b << ")";
    obj.name = os.str();
  }
  obj.dim = 2;
  obj.value = [a, b](const Vector& x) {
    check_dim(x, 2);
    const double u = a - x(0);
    const double w = x(1) - x(0) * x(0);
    return u * u + b * w * w;
  };
  obj.gradient = [a, b](const Vector& x) {
    check_dim(x, 2);
    const double w = x(1) - x(0) * x(0);
    Vector g(2);
    g(0) = -2.0 * (a - x(0)) - 4.0 * b * x(0) * w;
    g(1) = 2.0 * b * w;
    return g;
  };
  obj.hessian = [b](const Vector& x) {
    check_dim(x, 2);
    Matrix h(2, 2);
    h(0, 0) = 2.0 - 4.0 * b * (x(1) - x(0) * x(0)) + 8.0 * b * x(0) * x(0);
    h(0, 1) = -4.0 * b * x(0);
    h(1, 0) = h(0, 1);
    h(1, 1) = 2.0 * b;
    return SymMatrix(h);
  };
  if (b > 0.0) obj.known_minimizer = Vector{{a, a * a}};
  return obj;
}

StationaryKind classify_stationary(const RosenbrockParams& params) {
  if (params.b > 0.0) return StationaryKind::StrictGlobalMin;
  if (params.b < 0.0) return StationaryKind::Saddle;
  return StationaryKind::NonStrictMinimaLine;
}

std::string to_string(StationaryKind kind) {
  switch (kind) {
    case StationaryKind::StrictGlobalMin:
      return "strict-global-min";
    case StationaryKind::Saddle:
      return "saddle";
    case StationaryKind::NonStrictMinimaLine:
      return "non-strict-minima-line";
  }
  return "unknown";
}

Objective quadratic(const SymMatrix& q, const Vector& x_star) {
  if (x_star.size() != q.dim()) throw DimensionError("quadratic: minimizer and matrix dimensions differ");
  if (!x_star.allFinite()) throw ConfigError("quadratic: minimizer must be finite");
  const double lmin = min_eigenvalue(q);
  if (!(lmin > 0.0)) {
    std::ostringstream os;
    os << "quadratic: Q must be positive definite, smallest eigenvalue " << lmin;
    throw NotPositiveDefinite(os.str());
  }

  Objective obj;
  obj.name = "quadratic";
  obj.dim = q.dim();
  const Eigen::Index n = q.dim();
  obj.value = [q, x_star, n](const Vector& x) {
    check_dim(x, n);
    const Vector d = x - x_star;
    return 0.5 * d.dot(q.matrix() * d);
  };
  obj.gradient = [q, x_star, n](const Vector& x) {
    check_dim(x, n);
    return Vector(q.matrix() * (x - x_star));
  };
  obj.hessian = [q, n](const Vector& x) {
    check_dim(x, n);
    return q;
  };
  obj.known_minimizer = x_star;
  return obj;
}

FdErrors fd_validate(const Objective& obj, const Vector& x, double h_grad, double h_hess) {
  if (!(h_grad > 0.0) || !(h_hess > 0.0)) throw ConfigError("finite-difference step must be positive");
  check_dim(x, obj.dim);

  const Eigen::Index n = obj.dim;
  const Vector grad = obj.gradient(x);
  const Matrix hess = obj.hessian(x).matrix();

  FdErrors out;
  Vector xp = x;
  Vector xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i) = x(i) + h_grad;
    xm(i) = x(i) - h_grad;
    const double fd = (obj.value(xp) - obj.value(xm)) / (2.0 * h_grad);
    out.grad_err = std::max(out.grad_err, std::abs(fd - grad(i)));

    xp(i) = x(i) + h_hess;
    xm(i) = x(i) - h_hess;
    const Vector col = (obj.gradient(xp) - obj.gradient(xm)) / (2.0 * h_hess);
    out.hess_err = std::max(out.hess_err, (col - hess.col(i)).cwiseAbs().maxCoeff());

    xp(i) = x(i);
    xm(i) = x(i);
  }
  return out;
}

}  // namespace fintime
