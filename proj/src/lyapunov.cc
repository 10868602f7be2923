#include "fintime/lyapunov.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace fintime {

std::string to_string(SettlingSource s) {
  switch (s) {
    case SettlingSource::Lemma1:
      return "lemma1";
    case SettlingSource::Eq8Gnf1:
      return "eq8-gnf1";
    case SettlingSource::Eq8Gnf2Paper:
      return "eq8-gnf2-paper";
    case SettlingSource::Eq8Gnf2Derived:
      return "eq8-gnf2-derived";
  }
  return "unknown";
}

double v_grad_sq(const Objective& obj, const Vector& x) { return obj.gradient(x).squaredNorm(); }

double v_grad_l1(const Objective& obj, const Vector& x) { return obj.gradient(x).lpNorm<1>(); }

double lyapunov_value(const Objective& obj, FlowVariant variant, const Vector& x) {
  return variant == FlowVariant::GNF2 ? v_grad_l1(obj, x) : v_grad_sq(obj, x);
}

double lyapunov_rate(const Objective& obj, FlowVariant variant, const Vector& x,
                     const Vector& velocity) {
  const Vector g = obj.gradient(x);
  const Vector hv = obj.hessian(x) * velocity;
  if (variant == FlowVariant::GNF2) return sign_vec(g).dot(hv);
  return 2.0 * g.dot(hv);
}

namespace {

void check_params(const EnvelopeParams& params) {
  if (!(params.E0 > 0.0) || !(params.c > 0.0) || !std::isfinite(params.alpha)) {
    throw ConfigError("envelope requires E0 > 0, c > 0 and finite alpha");
  }
}

}  // namespace

double settling_time(const EnvelopeParams& params) {
  check_params(params);
  if (params.alpha >= 1.0) return std::numeric_limits<double>::infinity();
  const double k = 1.0 - params.alpha;
  return std::pow(params.E0, k) / (params.c * k);
}

double envelope(const EnvelopeParams& params, double t) {
  check_params(params);
  if (params.alpha >= 1.0) throw AlphaOutOfRange("envelope requires alpha < 1; use envelope_exp");
  if (t < 0.0) throw ConfigError("envelope time must be nonnegative");
  if (t >= settling_time(params)) return 0.0;
  const double k = 1.0 - params.alpha;
  const double bracket = std::max(0.0, std::pow(params.E0, k) - params.c * k * t);
  return std::pow(bracket, 1.0 / k);
}

double envelope_exp(const EnvelopeParams& params, double t) {
  check_params(params);
  if (params.alpha < 1.0) throw AlphaOutOfRange("envelope_exp requires alpha >= 1");
  if (t < 0.0) throw ConfigError("envelope time must be nonnegative");
  if (params.alpha == 1.0) return params.E0 * std::exp(-params.c * t);
  const double m = params.alpha - 1.0;
  return std::pow(std::pow(params.E0, -m) + params.c * m * t, -1.0 / m);
}

double settling_from_norm(SettlingSource source, double norm, double c, double p) {
  switch (source) {
    case SettlingSource::Eq8Gnf1:
    case SettlingSource::Eq8Gnf2Derived:
      return std::pow(norm, 2.0 - p) / (c * (2.0 - p));
    case SettlingSource::Eq8Gnf2Paper:
      return std::pow(norm, p) / (c * p);
    case SettlingSource::Lemma1:
      break;
  }
  throw ConfigError("settling_from_norm needs a flow-specific source");
}

std::vector<SettlingPrediction> predicted_settling(const Objective& obj, const Vector& x0,
                                                   const FlowConfig& cfg) {
  const Vector g = obj.gradient(x0);
  std::vector<SettlingPrediction> out;
  switch (cfg.variant()) {
    case FlowVariant::GNF1: {
      const double n2 = g.norm();
      if (!(n2 > kGradientFloor)) throw ZeroGradient("no settling time at a stationary point");
      out.push_back({settling_from_norm(SettlingSource::Eq8Gnf1, n2, cfg.c(), cfg.p()),
                     SettlingSource::Eq8Gnf1});
      break;
    }
    case FlowVariant::GNF2: {
      const double n1 = g.lpNorm<1>();
      if (!(n1 > kGradientFloor)) throw ZeroGradient("no settling time at a stationary point");
      out.push_back({settling_from_norm(SettlingSource::Eq8Gnf2Paper, n1, cfg.c(), cfg.p()),
                     SettlingSource::Eq8Gnf2Paper});
      out.push_back({settling_from_norm(SettlingSource::Eq8Gnf2Derived, n1, cfg.c(), cfg.p()),
                     SettlingSource::Eq8Gnf2Derived});
      break;
    }
    default:
      break;
  }
  return out;
}

std::vector<EnvelopeSample> envelope_oracle(const EnvelopeParams& params, double t_end,
                                            int n_steps) {
  check_params(params);
  if (!(t_end > 0.0) || n_steps < 1) throw ConfigError("oracle needs t_end > 0 and n_steps >= 1");

  const double c = params.c;
  const double alpha = params.alpha;
  auto rate = [c, alpha](double e) { return e > 0.0 ? -c * std::pow(e, alpha) : 0.0; };

  const double h = t_end / n_steps;
  std::vector<EnvelopeSample> out;
  out.reserve(static_cast<size_t>(n_steps) + 1);
  double e = params.E0;
  out.push_back({0.0, e});
  for (int i = 1; i <= n_steps; ++i) {
    const double k1 = rate(e);
    const double k2 = rate(e + 0.5 * h * k1);
    const double k3 = rate(e + 0.5 * h * k2);
    const double k4 = rate(e + h * k3);
    e = std::max(0.0, e + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    out.push_back({i * h, e});
  }
  return out;
}

}  // namespace fintime
