#include <catch_amalgamated.hpp>

#include <cmath>

#include "fintime/integrator.hpp"
#include "fintime/lyapunov.hpp"
#include "test_helpers.hpp"

using namespace fintime;
using Catch::Approx;

namespace {

Objective identity_quadratic(Eigen::Index n) { return quadratic(SymMatrix::identity(n), Vector::Zero(n)); }

// dV/dt at x by central differences of V along the flow map itself.
double flow_map_rate(const Objective& obj, const FlowConfig& cfg, const Vector& x, double delta) {
  const Rhs rhs = [&](const Vector& y) { return flow_rhs(obj, cfg, y); };
  const double vp = lyapunov_value(obj, cfg.variant(), dormand_prince_step(rhs, x, delta).x);
  const double vm = lyapunov_value(obj, cfg.variant(), dormand_prince_step(rhs, x, -delta).x);
  return (vp - vm) / (2.0 * delta);
}

}  // namespace

TEST_CASE("options validation", "[integrator]") {
  IntegratorOptions o;
  CHECK_NOTHROW(o.validate());
  o.h_min = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.record_stride = 0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = {};
  o.t_max = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(o.validate(), ConfigError);

  const Objective f = identity_quadratic(2);
  CHECK_THROWS_AS(integrate(f, FlowConfig(FlowVariant::GNF1), Vector::Ones(3), {}), DimensionError);
}

TEST_CASE("gradient flow on the identity quadratic", "[integrator]") {
  IntegratorOptions o;
  o.t_max = 1.0;
  const Trajectory traj = integrate(identity_quadratic(2), FlowConfig(FlowVariant::GradientFlow), Vector{{1.0, 0.0}}, o);
  CHECK(traj.termination == Termination::TMaxReached);
  CHECK(traj.samples.back().t == 1.0);
  CHECK(traj.samples.back().x(0) == Approx(std::exp(-1.0)).margin(1e-6));
  CHECK(traj.samples.front().t == 0.0);
  for (size_t i = 1; i < traj.samples.size(); ++i) CHECK(traj.samples[i].t > traj.samples[i - 1].t);
  CHECK_THROWS_AS(measure_settling(traj, 1e-9), NotConverged);
}

TEST_CASE("GNF1 radial collapse on the identity quadratic", "[integrator]") {
  // ||x0|| = 2, c = 2, p = 1: ||g(t)|| = 2 - 2t, settling at t = 1.
  const Objective f = identity_quadratic(2);
  const FlowConfig cfg(FlowVariant::GNF1, 2.0, 1.0, 0.0);
  IntegratorOptions o;
  o.t_max = 5.0;
  const Trajectory traj = integrate(f, cfg, Vector{{1.2, -1.6}}, o);
  REQUIRE(traj.termination == Termination::Converged);
  CHECK(measure_settling(traj, 1e-9) == Approx(1.0).margin(1e-3));
  for (const Sample& s : traj.samples) CHECK(s.grad_norm_2 == Approx(2.0 - 2.0 * s.t).margin(1e-6));
  CHECK(traj.samples.back().x.norm() <= 1e-9);
}

TEST_CASE("start below the threshold converges at time zero", "[integrator]") {
  const Objective f = rosenbrock({2.0, 50.0});
  const Trajectory traj = integrate(f, FlowConfig(FlowVariant::GNF1, 1.0, 1.0, -1.0), Vector{{2.0, 4.0}}, {});
  CHECK(traj.termination == Termination::Converged);
  REQUIRE(traj.samples.size() == 1);
  CHECK(measure_settling(traj, 1e-9) == 0.0);
}

TEST_CASE("measure_settling interpolates between samples", "[integrator]") {
  Trajectory traj;
  traj.variant = FlowVariant::GNF1;
  traj.termination = Termination::Converged;
  for (double t : {0.0, 0.5, 1.0}) {
    Sample s;
    s.t = t;
    s.grad_norm_2 = 2.0 - 2.0 * t;
    traj.samples.push_back(s);
  }
  CHECK(measure_settling(traj, 0.5) == Approx(0.75));
  CHECK(measure_settling(traj, 2.0) == 0.0);
  CHECK_THROWS_AS(measure_settling(traj, -1.0), NotConverged);
  traj.termination = Termination::StepUnderflow;
  CHECK_THROWS_AS(measure_settling(traj, 0.5), NotConverged);
}

TEST_CASE("tighter tolerances do not increase the final-state error", "[integrator][property]") {
  const Objective f = quadratic(SymMatrix::diagonal(Vector{{1.0, 4.0}}), Vector::Zero(2));
  const Vector x0{{1.0, 1.0}};
  const Vector exact{{std::exp(-1.0), std::exp(-4.0)}};
  double prev = std::numeric_limits<double>::infinity();
  for (double tol = 1e-3; tol >= 1e-9; tol /= 2.0) {
    IntegratorOptions o;
    o.t_max = 1.0;
    o.rel_tol = tol;
    o.abs_tol = tol;
    const Trajectory traj = integrate(f, FlowConfig(FlowVariant::GradientFlow), x0, o);
    const double err = (traj.samples.back().x - exact).norm();
    INFO("tol=" << tol << " err=" << err << " prev=" << prev);
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("GNF1 keeps the gradient norm nonincreasing", "[integrator][property]") {
  std::mt19937 rng(21);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Index n = 2 + k % 3;
    const Objective f = quadratic(fintime::testing::random_spd(rng, n), fintime::testing::random_vector(rng, n));
    const Vector x0 = fintime::testing::random_vector(rng, n, -3.0, 3.0);
    for (double r : {-1.0, 0.0, 1.0}) {
      const FlowConfig cfg(FlowVariant::GNF1, 1.0, 1.5, r);
      IntegratorOptions o;
      o.t_max = 2.0 * predicted_settling(f, x0, cfg).front().t_star + 1.0;
      const Trajectory traj = integrate(f, cfg, x0, o);
      REQUIRE(traj.termination == Termination::Converged);
      for (size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].grad_norm_2 <= traj.samples[i - 1].grad_norm_2 + 1e-9);
      }
    }
  }
}

TEST_CASE("GNF1 with p = 1 decays the gradient norm linearly", "[integrator][property]") {
  const Objective f = rosenbrock({2.0, 50.0});
  const FlowConfig cfg(FlowVariant::GNF1, 3.0, 1.0, -1.0);
  const Vector x0{{0.0, 0.0}};
  const double g0 = f.gradient(x0).norm();
  IntegratorOptions o;
  o.t_max = 2.0 * g0 / 3.0;
  const Trajectory traj = integrate(f, cfg, x0, o);
  REQUIRE(traj.termination == Termination::Converged);
  const double t_star = g0 / 3.0;
  for (const Sample& s : traj.samples) {
    const double expected = g0 - 3.0 * s.t;
    // Drift at the integrator's tolerance scale stays once the norm is tiny.
    if (s.t < t_star) CHECK(std::abs(s.grad_norm_2 - expected) <= 1e-4 * expected + 1e-8 * g0);
  }
}

TEST_CASE("stop event is localized to within h_min", "[integrator]") {
  const Objective f = identity_quadratic(3);
  const FlowConfig cfg(FlowVariant::GNF1, 1.0, 1.25, 0.0);
  IntegratorOptions o;
  o.stop_grad_norm = 1e-4;
  const Trajectory traj = integrate(f, cfg, Vector{{0.5, -1.0, 2.0}}, o);
  REQUIRE(traj.termination == Termination::Converged);
  const Sample& last = traj.samples.back();
  CHECK(last.grad_norm_2 <= 1e-4);
  CHECK(std::abs(measure_settling(traj, 1e-4) - last.t) <= 10.0 * o.h_min);
  // Exact crossing: ||g||^{0.75} = ||g0||^{0.75} - 0.75 t.
  const double g0 = std::sqrt(0.25 + 1.0 + 4.0);
  const double t_exact = (std::pow(g0, 0.75) - std::pow(1e-4, 0.75)) / 0.75;
  CHECK(last.t == Approx(t_exact).epsilon(1e-6));
}

TEST_CASE("leaving the SPD region ends the run", "[integrator]") {
  const Objective f = rosenbrock({2.0, 50.0});
  const Trajectory traj = integrate(f, FlowConfig(FlowVariant::GNF1, 1.0, 1.0, -1.0), Vector{{0.0, 4.5}}, {});
  CHECK(traj.termination == Termination::LeftDomain);
  CHECK(traj.samples.size() == 1);
  CHECK_FALSE(traj.message.empty());
}

TEST_CASE("step budget and horizon", "[integrator]") {
  const Objective f = identity_quadratic(2);
  IntegratorOptions o;
  o.max_steps = 3;
  const Trajectory a = integrate(f, FlowConfig(FlowVariant::GradientFlow), Vector{{1.0, 1.0}}, o);
  CHECK(a.termination == Termination::MaxSteps);
  CHECK(a.accepted_steps == 3);

  IntegratorOptions s;
  s.t_max = 1.0;
  s.record_stride = 1000000;
  const Trajectory b = integrate(f, FlowConfig(FlowVariant::GradientFlow), Vector{{1.0, 1.0}}, s);
  CHECK(b.samples.size() == 2);
  CHECK(b.samples.back().t == 1.0);
}

TEST_CASE("Lyapunov rates along integrated trajectories", "[integrator][property]") {
  SECTION("GNF1: dV/dt = -2c V^{p/2}") {
    const Objective f = rosenbrock({2.0, 50.0});
    for (double p : {1.0, 1.5}) {
      const Vector x0{{4.0, 0.0}};
      const FlowConfig cfg(FlowVariant::GNF1, 2.0, p, -1.0);
      IntegratorOptions o;
      o.t_max = 2.0 * predicted_settling(f, x0, cfg).front().t_star + 1.0;
      const Trajectory traj = integrate(f, cfg, x0, o);
      REQUIRE(traj.termination == Termination::Converged);
      const double t_end = traj.samples.back().t;
      for (size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        const double rate = flow_map_rate(f, cfg, s.x, 1e-4 * (t_end - s.t));
        const double expected = -4.0 * std::pow(s.V, p / 2.0);
        CHECK(std::abs(rate - expected) <= 1e-4 * (1.0 + std::abs(rate)));
      }
    }
  }
  SECTION("GNF2: dV/dt = -c V^{p-1} from an equal-magnitude start") {
    const SymMatrix q = SymMatrix::diagonal(Vector{{1.0, 4.0}});
    const Objective f = quadratic(q, Vector::Zero(2));
    const Vector x0 = q.matrix().ldlt().solve(Vector{{1.5, -1.5}});
    for (double p : {1.0, 1.5}) {
      const FlowConfig cfg(FlowVariant::GNF2, 1.0, p, -1.0);
      IntegratorOptions o;
      o.t_max = 20.0;
      const Trajectory traj = integrate(f, cfg, x0, o);
      REQUIRE(traj.termination == Termination::Converged);
      const double t_end = traj.samples.back().t;
      for (size_t i = 1; i + 1 < traj.samples.size(); ++i) {
        const Sample& s = traj.samples[i];
        const double rate = flow_map_rate(f, cfg, s.x, 1e-4 * (t_end - s.t));
        const double expected = -std::pow(s.V, p - 1.0);
        CHECK(std::abs(rate - expected) <= 1e-4 * (1.0 + std::abs(rate)));
      }
    }
  }
}
