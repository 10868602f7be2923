#pragma once

#include <functional>
#include <optional>
#include <string>

#include "fintime/symmat.hpp"

namespace fintime {

/// Twice-differentiable cost function with analytic value, gradient and
/// Hessian. Evaluation is pure, so an Objective may be shared across threads.
struct Objective {
  std::string name;
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::function<SymMatrix(const Vector&)> hessian;
  std::optional<Vector> known_minimizer;
};

struct RosenbrockParams {
  double a = 2.0;
  double b = 50.0;
};

/// f(x) = (a - x1)^2 + b (x2 - x1^2)^2 with analytic derivatives.
/// known_minimizer = (a, a^2) iff b > 0.
Objective rosenbrock(const RosenbrockParams& params);

enum class StationaryKind { StrictGlobalMin, Saddle, NonStrictMinimaLine };

/// Nature of the stationary point (a, a^2) as a function of the sign of b.
StationaryKind classify_stationary(const RosenbrockParams& params);
std::string to_string(StationaryKind kind);

/// f(x) = 1/2 (x - x*)^T Q (x - x*). Throws NotPositiveDefinite unless Q is SPD.
Objective quadratic(const SymMatrix& q, const Vector& x_star);

struct FdErrors {
  double grad_err = 0.0;
  double hess_err = 0.0;
};

inline constexpr double kFdGradientStep = 1e-5;
inline constexpr double kFdHessianStep = 1e-4;

/// Max-abs deviation of the analytic gradient from central differences of the
/// value (step h_grad), and of the analytic Hessian from central differences
/// of the gradient (step h_hess).
FdErrors fd_validate(const Objective& obj, const Vector& x, double h_grad, double h_hess);

inline FdErrors fd_validate(const Objective& obj, const Vector& x, double h) {
  return fd_validate(obj, x, h, h);
}

inline FdErrors fd_validate(const Objective& obj, const Vector& x) {
  return fd_validate(obj, x, kFdGradientStep, kFdHessianStep);
}

}  // namespace fintime
