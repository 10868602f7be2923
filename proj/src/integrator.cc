#include "fintime/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fintime/lyapunov.hpp"

namespace fintime {

void IntegratorOptions::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("integrator options: " + what); };
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) fail("tolerances must be positive");
  if (!(h_min > 0.0)) fail("h_min must be positive");
  if (!(h_min <= h_init)) fail("h_min must not exceed h_init");
  if (!(h_init <= h_max)) fail("h_init must not exceed h_max");
  if (!(stop_grad_norm > 0.0)) fail("stop_grad_norm must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) fail("t_max must be positive and finite");
  if (max_steps < 1) fail("max_steps must be at least 1");
  if (record_stride < 1) fail("record_stride must be at least 1");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Converged:
      return "converged";
    case Termination::TMaxReached:
      return "t_max_reached";
    case Termination::LeftDomain:
      return "left_domain";
    case Termination::StepUnderflow:
      return "step_underflow";
    case Termination::MaxSteps:
      return "max_steps";
  }
  return "unknown";
}

RkStep dormand_prince_step(const Rhs& rhs, const Vector& x, double h) {
  // Dormand-Prince 5(4) tableau.
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                   a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                   a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                   e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  const Vector k1 = rhs(x);
  const Vector k2 = rhs(x + h * (a21 * k1));
  const Vector k3 = rhs(x + h * (a31 * k1 + a32 * k2));
  const Vector k4 = rhs(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Vector k5 = rhs(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Vector k6 = rhs(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  RkStep out;
  out.x = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Vector k7 = rhs(out.x);
  out.error = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return out;
}

namespace {

// Fraction of V / |dV/dt| allowed per step for the finite-time flows.
constexpr double kSettlingStepFraction = 0.5;
constexpr int kMaxBisections = 200;

double error_norm(const Vector& x, const RkStep& step, const IntegratorOptions& opts) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double scale = opts.abs_tol + opts.rel_tol * std::max(std::abs(x(i)), std::abs(step.x(i)));
    worst = std::max(worst, std::abs(step.error(i)) / scale);
  }
  return worst;
}

// Local error mapped to gradient space, relative to the gradient itself. The
// floor is what rounding in x lets the gradient resolve at all.
double gradient_error_norm(const Objective& obj, FlowVariant variant, const RkStep& step,
                           const IntegratorOptions& opts) {
  const Matrix h = obj.hessian(step.x).matrix();
  const Vector g = obj.gradient(step.x);
  const Vector dg = h * step.error;
  const double floor =
      64.0 * std::numeric_limits<double>::epsilon() * h.cwiseAbs().maxCoeff() * step.x.cwiseAbs().maxCoeff();
  if (variant == FlowVariant::GNF2) return dg.lpNorm<1>() / (opts.rel_tol * g.lpNorm<1>() + floor + 1e-300);
  return dg.norm() / (opts.rel_tol * g.norm() + floor + 1e-300);
}

class Runner {
 public:
  Runner(const Objective& obj, const FlowConfig& cfg, const IntegratorOptions& opts)
      : obj_(obj), cfg_(cfg), opts_(opts), rhs_([this](const Vector& x) { return flow_rhs(obj_, cfg_, x); }) {
    traj_.variant = cfg.variant();
  }

  Trajectory run(const Vector& x0) {
    record(0.0, x0);
    if (watched_norm(x0) <= opts_.stop_grad_norm) return finish(Termination::Converged, "start already below threshold");

    double t = 0.0;
    Vector x = x0;
    double h = std::min(opts_.h_init, opts_.h_max);
    int since_record = 0;

    while (true) {
      if (traj_.accepted_steps >= opts_.max_steps) {
        record_if_new(t, x);
        return finish(Termination::MaxSteps, "step budget exhausted");
      }

      Vector velocity;
      try {
        velocity = rhs_(x);
      } catch (const NotPositiveDefinite& e) {
        record_if_new(t, x);
        return finish(Termination::LeftDomain, e.what());
      } catch (const ZeroGradient& e) {
        record_if_new(t, x);
        return finish(Termination::Converged, e.what());
      }

      const double remaining = opts_.t_max - t;
      double h_cap = std::min(opts_.h_max, remaining);
      // With a large gain the time left to the equilibrium can drop below
      // h_min; the settling cap then also lowers the step floor.
      double h_floor = std::min(opts_.h_min, remaining);
      if (is_finite_time(cfg_.variant())) {
        const double rate = lyapunov_rate(obj_, cfg_.variant(), x, velocity);
        const double v = lyapunov_value(obj_, cfg_.variant(), x);
        if (rate < 0.0) {
          const double settle_cap = kSettlingStepFraction * v / -rate;
          h_cap = std::min(h_cap, settle_cap);
          h_floor = std::min(h_floor, settle_cap);
        }
      }
      h = std::min(h, h_cap);
      h = std::max(h, h_floor);

      RkStep step;
      try {
        step = dormand_prince_step(rhs_, x, h);
      } catch (const NotPositiveDefinite& e) {
        ++traj_.rejected_steps;
        if (h <= h_floor) {
          record_if_new(t, x);
          return finish(Termination::LeftDomain, e.what());
        }
        h = std::max(0.25 * h, h_floor);
        continue;
      } catch (const ZeroGradient& e) {
        ++traj_.rejected_steps;
        if (h <= h_floor) {
          record_if_new(t, x);
          return finish(Termination::StepUnderflow, e.what());
        }
        h = std::max(0.25 * h, h_floor);
        continue;
      }

      double err = error_norm(x, step, opts_);
      if (is_finite_time(cfg_.variant()) && step.x.allFinite()) {
        err = std::max(err, gradient_error_norm(obj_, cfg_.variant(), step, opts_));
      }
      if (!std::isfinite(err) || err > 1.0 || !step.x.allFinite()) {
        ++traj_.rejected_steps;
        if (h <= h_floor) {
          record_if_new(t, x);
          std::ostringstream os;
          os << "required step below h_min at t=" << t;
          return finish(Termination::StepUnderflow, os.str());
        }
        const double shrink = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
        h = std::max(h * shrink, h_floor);
        continue;
      }

      ++traj_.accepted_steps;
      if (watched_norm(step.x) <= opts_.stop_grad_norm) {
        localize_event(t, x, h, step.x);
        return finish(Termination::Converged, "gradient norm reached threshold");
      }

      t = (h >= remaining) ? opts_.t_max : t + h;
      x = step.x;
      bool recorded = false;
      if (++since_record >= opts_.record_stride) {
        record(t, x);
        since_record = 0;
        recorded = true;
      }
      if (t >= opts_.t_max) {
        if (!recorded) record(t, x);
        return finish(Termination::TMaxReached, "reached t_max");
      }

      const double grow = err == 0.0 ? 5.0 : std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
      h *= grow;
    }
  }

 private:
  double watched_norm(const Vector& x) const {
    const Vector g = obj_.gradient(x);
    return cfg_.variant() == FlowVariant::GNF2 ? g.lpNorm<1>() : g.norm();
  }

  // Shrinks [0, h] around the threshold crossing by re-stepping from x.
  void localize_event(double t, const Vector& x, double h, Vector x_hi) {
    double lo = 0.0;
    double hi = h;
    for (int i = 0; i < kMaxBisections && hi - lo > opts_.h_min; ++i) {
      const double mid = 0.5 * (lo + hi);
      try {
        Vector xm = dormand_prince_step(rhs_, x, mid).x;
        if (watched_norm(xm) <= opts_.stop_grad_norm) {
          hi = mid;
          x_hi = std::move(xm);
        } else {
          lo = mid;
        }
      } catch (const Error&) {
        hi = mid;  // stages touched the singular point: crossing lies earlier
      }
    }
    record(t + hi, x_hi);
  }

  void record(double t, const Vector& x) {
    const Vector g = obj_.gradient(x);
    Sample s;
    s.t = t;
    s.x = x;
    s.f = obj_.value(x);
    s.grad_norm_2 = g.norm();
    s.grad_norm_1 = g.lpNorm<1>();
    s.V = cfg_.variant() == FlowVariant::GNF2 ? s.grad_norm_1 : s.grad_norm_2 * s.grad_norm_2;
    traj_.samples.push_back(std::move(s));
  }

  void record_if_new(double t, const Vector& x) {
    if (traj_.samples.empty() || traj_.samples.back().t < t) record(t, x);
  }

  Trajectory finish(Termination term, std::string message) {
    traj_.termination = term;
    traj_.message = std::move(message);
    return std::move(traj_);
  }

  const Objective& obj_;
  const FlowConfig& cfg_;
  const IntegratorOptions& opts_;
  Rhs rhs_;
  Trajectory traj_;
};

}  // namespace

Trajectory integrate(const Objective& obj, const FlowConfig& cfg, const Vector& x0,
                     const IntegratorOptions& opts) {
  opts.validate();
  if (x0.size() != obj.dim) {
    std::ostringstream os;
    os << "initial point has dimension " << x0.size() << ", objective expects " << obj.dim;
    throw DimensionError(os.str());
  }
  if (!x0.allFinite()) throw ConfigError("initial point must be finite");
  return Runner(obj, cfg, opts).run(x0);
}

double measure_settling(const Trajectory& traj, double epsilon) {
  if (traj.termination != Termination::Converged) {
    throw NotConverged("trajectory terminated with " + to_string(traj.termination));
  }
  const auto& s = traj.samples;
  for (size_t i = 0; i < s.size(); ++i) {
    const double n1 = traj.stop_norm(s[i]);
    if (n1 > epsilon) continue;
    if (i == 0) return s[0].t;
    const double n0 = traj.stop_norm(s[i - 1]);
    const double frac = (n0 - epsilon) / (n0 - n1);
    return s[i - 1].t + frac * (s[i].t - s[i - 1].t);
  }
  throw NotConverged("gradient norm never reached the requested epsilon");
}

}  // namespace fintime
