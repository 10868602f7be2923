#include "fintime/flows.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace fintime {

std::string to_string(FlowVariant v) {
  switch (v) {
    case FlowVariant::GNF1:
      return "gnf1";
    case FlowVariant::GNF2:
      return "gnf2";
    case FlowVariant::GradientFlow:
      return "gradient";
    case FlowVariant::NewtonFlow:
      return "newton";
  }
  return "unknown";
}

FlowVariant parse_flow_variant(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "gnf1") return FlowVariant::GNF1;
  if (lower == "gnf2") return FlowVariant::GNF2;
  if (lower == "gradient") return FlowVariant::GradientFlow;
  if (lower == "newton") return FlowVariant::NewtonFlow;
  throw ConfigError("unknown flow '" + std::string(s) + "' (expected gnf1, gnf2, gradient, newton)");
}

FlowConfig::FlowConfig(FlowVariant variant, double c, double p, double r)
    : variant_(variant), c_(c), p_(p), r_(r) {
  if (!std::isfinite(c) || !std::isfinite(p) || !std::isfinite(r)) {
    throw ConfigError("flow parameters must be finite");
  }
  if (is_finite_time(variant)) {
    if (!(c > 0.0)) throw ConfigError("flow gain c must be positive");
    if (!(p >= 1.0 && p < 2.0)) throw ConfigError("flow exponent p must lie in [1, 2)");
  }
}

Vector sign_vec(const Vector& g, double floor) {
  return g.unaryExpr([floor](double v) {
    if (v > floor) return 1.0;
    if (v < -floor) return -1.0;
    return 0.0;
  });
}

namespace {

// -scale * H^r d / (d^T H^{r+1} d), shared by both finite-time flows.
Vector normalized_newton_direction(const SymMatrix& hess, double r, const Vector& d, double scale) {
  const EigenDecomp eig = sym_eig(hess);
  const Vector num = apply_power(eig, r, d);
  const double den = d.dot(apply_power(eig, r + 1.0, d));
  if (!(den > kDenominatorFloor)) {
    std::ostringstream os;
    os << "normalizing quadratic form vanished (" << den << ")";
    throw ZeroGradient(os.str());
  }
  return (-scale / den) * num;
}

}  // namespace

Vector gnf1_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x) {
  const Vector g = obj.gradient(x);
  const double gnorm = g.norm();
  if (!(gnorm > kGradientFloor)) throw ZeroGradient("gradient norm below floor");
  return normalized_newton_direction(obj.hessian(x), cfg.r(), g, cfg.c() * std::pow(gnorm, cfg.p()));
}

Vector gnf2_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x) {
  const Vector g = obj.gradient(x);
  const Vector s = sign_vec(g);
  if (s.cwiseAbs().sum() == 0.0) throw ZeroGradient("every gradient component below floor");
  const double l1 = g.lpNorm<1>();
  return normalized_newton_direction(obj.hessian(x), cfg.r(), s, cfg.c() * std::pow(l1, cfg.p() - 1.0));
}

Vector baseline_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x) {
  const Vector g = obj.gradient(x);
  switch (cfg.variant()) {
    case FlowVariant::GradientFlow:
      return -g;
    case FlowVariant::NewtonFlow:
      return -apply_power(obj.hessian(x), -1.0, g);
    default:
      throw ConfigError("baseline_rhs called with a finite-time flow variant");
  }
}

Vector flow_rhs(const Objective& obj, const FlowConfig& cfg, const Vector& x) {
  switch (cfg.variant()) {
    case FlowVariant::GNF1:
      return gnf1_rhs(obj, cfg, x);
    case FlowVariant::GNF2:
      return gnf2_rhs(obj, cfg, x);
    default:
      return baseline_rhs(obj, cfg, x);
  }
}

double tune_c(const Objective& obj, const Vector& x0, double p, FlowVariant variant, double T,
              Gnf2Law law) {
  if (!(T > 0.0)) throw ConfigError("prescribed time must be positive");
  if (!(p >= 1.0 && p < 2.0)) throw ConfigError("flow exponent p must lie in [1, 2)");
  const Vector g = obj.gradient(x0);
  switch (variant) {
    case FlowVariant::GNF1: {
      const double n2 = g.norm();
      if (!(n2 > kGradientFloor)) throw ZeroGradient("cannot tune gain at a stationary point");
      return std::pow(n2, 2.0 - p) / ((2.0 - p) * T);
    }
    case FlowVariant::GNF2: {
      const double n1 = g.lpNorm<1>();
      if (!(n1 > kGradientFloor)) throw ZeroGradient("cannot tune gain at a stationary point");
      if (law == Gnf2Law::Paper) return std::pow(n1, p) / (p * T);
      return std::pow(n1, 2.0 - p) / ((2.0 - p) * T);
    }
    default:
      throw ConfigError("gain tuning applies only to gnf1/gnf2");
  }
}

}  // namespace fintime
