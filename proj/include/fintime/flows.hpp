#pragma once

#include <string>
#include <string_view>

#include "fintime/objective.hpp"

namespace fintime {

/// GNF1 and GNF2 are the finite-time generalized Newton-like flows driven by
/// ||grad f||^2 and ||grad f||_1 respectively; the other two are baselines.
enum class FlowVariant { GNF1, GNF2, GradientFlow, NewtonFlow };

std::string to_string(FlowVariant v);
/// Accepts gnf1, gnf2, gradient, newton (case-insensitive). Throws ConfigError.
FlowVariant parse_flow_variant(std::string_view s);

/// True for the two finite-time flows.
inline bool is_finite_time(FlowVariant v) { return v == FlowVariant::GNF1 || v == FlowVariant::GNF2; }

/// Flow variant plus gain c, exponent p and Hessian power r.
/// For GNF1/GNF2 the constructor enforces c > 0 and 1 <= p < 2.
class FlowConfig {
 public:
  FlowConfig(FlowVariant variant, double c = 1.0, double p = 1.0, double r = 0.0);

  FlowVariant variant() const { return variant_; }
  double c() const { return c_; }
  double p() const { return p_; }
  double r() const { return r_; }

  FlowConfig with_gain(double c) const { return FlowConfig(variant_, c, p_, r_); }

 private:
  FlowVariant variant_;
  double c_;
  double p_;
  double r_;
};

inline constexpr double kGradientFloor = 1e-14;
inline constexpr double kComponentFloor = 1e-14;
inline constexpr double kDenominatorFloor = 1e-300;

/// -c ||g||^p H^r g / (g^T H^{r+1} g). ZeroGradient at (numerical) stationarity,
/// NotPositiveDefinite outside the SPD region when r is fractional or negative.
Vector gnf1_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x);

/// -c ||g||_1^{p-1} H^r s / (s^T H^{r+1} s) with s = sign_vec(g).
Vector gnf2_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x);

/// Componentwise sign with sign(0) = 0; |g_i| <= floor counts as zero.
Vector sign_vec(const Vector& g, double floor = kComponentFloor);

/// -grad f for GradientFlow, -H^{-1} grad f for NewtonFlow.
Vector baseline_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x);

/// Dispatches on cfg.variant().
Vector flow_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x);

/// Which closed-form settling law to invert when tuning GNF2.
/// Derived: ||g0||_1^{2-p} / (c (2-p)). Paper: ||g0||_1^p / (c p).
enum class Gnf2Law { Derived, Paper };

/// Gain c that makes the predicted settling time equal to T.
double tune_c(const Objective& obj, const Vector& x0, double p, FlowVariant variant, double T,
              Gnf2Law law = Gnf2Law::Derived);

}  // namespace fintime
