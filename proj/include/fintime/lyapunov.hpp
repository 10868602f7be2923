#pragma once

#include <string>
#include <vector>

#include "fintime/flows.hpp"

namespace fintime {

/// Scalar comparison system dE/dt = -c E^alpha with E(0) = E0.
struct EnvelopeParams {
  double E0 = 1.0;
  double c = 1.0;
  double alpha = 0.0;
};

enum class SettlingSource { Lemma1, Eq8Gnf1, Eq8Gnf2Paper, Eq8Gnf2Derived };

std::string to_string(SettlingSource s);

struct SettlingPrediction {
  double t_star = 0.0;  // +inf when the envelope never reaches zero
  SettlingSource source = SettlingSource::Lemma1;
};

/// ||grad f(x)||^2
double v_grad_sq(const Objective& obj, const Vector& x);
/// ||grad f(x)||_1
double v_grad_l1(const Objective& obj, const Vector& x);

/// Lyapunov value the given flow variant drives to zero: ||g||_1 for GNF2,
/// ||g||^2 otherwise.
double lyapunov_value(const Objective& obj, FlowVariant variant, const Vector& x);

/// dV/dt = grad V(x) . velocity for the variant's Lyapunov function.
double lyapunov_rate(const Objective& obj, FlowVariant variant, const Vector& x,
                     const Vector& velocity);

/// Closed-form max(0, E0^{1-a} - c (1-a) t)^{1/(1-a)} for alpha < 1.
/// Exactly zero from settling_time onward. Throws AlphaOutOfRange for alpha >= 1.
double envelope(const EnvelopeParams& params, double t);

/// E0^{1-a} / (c (1-a)) for alpha < 1, +inf otherwise.
double settling_time(const EnvelopeParams& params);

/// Solution for alpha >= 1: exponential at alpha = 1, algebraic tail above.
double envelope_exp(const EnvelopeParams& params, double t);

/// Settling time the given source predicts when the relevant gradient norm
/// (2-norm for GNF1, 1-norm for GNF2) equals `norm`.
double settling_from_norm(SettlingSource source, double norm, double c, double p);

/// Every closed-form settling prediction applicable to the configured flow:
/// one for GNF1, the paper and derived forms for GNF2, none for baselines.
std::vector<SettlingPrediction> predicted_settling(const Objective& obj, const Vector& x0,
                                                   const FlowConfig& cfg);

struct EnvelopeSample {
  double t;
  double value;
};

/// Brute-force fixed-step RK4 integration of dE/dt = -c max(E, 0)^alpha on
/// [0, t_end]. Returns n_steps + 1 uniformly spaced samples. Does not use any
/// of the closed forms above.
std::vector<EnvelopeSample> envelope_oracle(const EnvelopeParams& params, double t_end,
                                            int n_steps);

}  // namespace fintime
