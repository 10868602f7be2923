#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fintime/flows.hpp"

namespace fintime {

struct IntegratorOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();  // effectively t_max
  double stop_grad_norm = 1e-9;
  double t_max = 10.0;
  std::int64_t max_steps = 10'000'000;
  int record_stride = 1;

  /// Throws ConfigError when the documented invariants do not hold.
  void validate() const;
};

enum class Termination { Converged, TMaxReached, LeftDomain, StepUnderflow, MaxSteps };

std::string to_string(Termination t);

struct Sample {
  double t = 0.0;
  Vector x;
  double f = 0.0;
  double grad_norm_2 = 0.0;
  double grad_norm_1 = 0.0;
  double V = 0.0;
};

struct Trajectory {
  FlowVariant variant = FlowVariant::GNF1;
  std::vector<Sample> samples;
  Termination termination = Termination::TMaxReached;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  std::string message;

  /// Gradient norm the stop event watches: 1-norm for GNF2, 2-norm otherwise.
  double stop_norm(const Sample& s) const {
    return variant == FlowVariant::GNF2 ? s.grad_norm_1 : s.grad_norm_2;
  }
};

using Rhs = std::function<Vector(const Vector&)>;

struct RkStep {
  Vector x;      // 5th-order solution
  Vector error;  // difference to the embedded 4th-order solution
};

/// One Dormand-Prince 5(4) step of size h (h may be negative).
/// Exceptions from rhs propagate.
RkStep dormand_prince_step(const Rhs& rhs, const Vector& x, double h);

/// Adaptive integration of the configured flow from x0.
///
/// Stops with Converged when the watched gradient norm falls to
/// opts.stop_grad_norm; the crossing is localized by bisection on the last
/// step to within h_min. For the finite-time flows each step is capped at a
/// fraction of V / |dV/dt|, which is strictly less than the remaining time to
/// the equilibrium for any exact decay law dV/dt = -k V^alpha with alpha in
/// [0, 1), so the integrator does not step across the singular point.
///
/// Leaving the SPD region of the Hessian ends the run with LeftDomain.
Trajectory integrate(const Objective& obj, const FlowConfig& cfg, const Vector& x0,
                     const IntegratorOptions& opts);

/// Earliest time the watched gradient norm reaches epsilon, linearly
/// interpolated between bracketing samples. Throws NotConverged unless the
/// trajectory terminated Converged.
double measure_settling(const Trajectory& traj, double epsilon);

}  // namespace fintime
