#include "fintime/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

namespace fintime {

unsigned worker_count() {
  if (const char* env = std::getenv("FINTIME_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const size_t workers = std::min<size_t>(worker_count(), n);
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

double watched_norm(const Vector& g, FlowVariant v) {
  return v == FlowVariant::GNF2 ? g.lpNorm<1>() : g.norm();
}

void compare(PredictionRecord& rec, double measured, double epsilon, const FlowConfig& flow) {
  const double corrected = measured + settling_from_norm(rec.source, epsilon, flow.c(), flow.p());
  rec.corrected_measured = corrected;
  rec.rel_error = std::abs(corrected - rec.t_star) / rec.t_star;
}

void scan_monotonicity(const Trajectory& traj, const std::optional<Vector>& minimizer, RunRecord& rec) {
  const auto& s = traj.samples;
  for (size_t i = 1; i < s.size(); ++i) {
    if (s[i].grad_norm_2 > s[i - 1].grad_norm_2 + kMonotoneSlack) rec.grad_norm_nonincreasing = false;
    if (s[i].f > s[i - 1].f + kMonotoneSlack) rec.value_increased = true;
    if (minimizer && (s[i].x - *minimizer).norm() > (s[i - 1].x - *minimizer).norm() + kMonotoneSlack) {
      rec.distance_increased = true;
    }
  }
}

RunRecord run_one(const Objective& obj, const ExperimentConfig& cfg, const Vector& x0, Trajectory& traj) {
  RunRecord rec;
  rec.x0 = x0;
  rec.final_x = x0;
  const double eps = cfg.integrator.stop_grad_norm;
  try {
    FlowConfig flow = cfg.flow;
    const Vector g0 = obj.gradient(x0);
    const bool moving = watched_norm(g0, flow.variant()) > eps;
    if (moving && cfg.prescribed_time && is_finite_time(flow.variant())) {
      flow = flow.with_gain(tune_c(obj, x0, flow.p(), flow.variant(), *cfg.prescribed_time, cfg.gnf2_law));
    }
    rec.c = flow.c();
    if (moving) {
      for (const SettlingPrediction& pred : predicted_settling(obj, x0, flow)) {
        rec.predictions.push_back({pred.source, pred.t_star, std::nullopt, std::nullopt});
      }
    }

    traj = integrate(obj, flow, x0, cfg.integrator);
    rec.termination = traj.termination;
    rec.message = traj.message;
    rec.accepted_steps = traj.accepted_steps;
    rec.rejected_steps = traj.rejected_steps;
    rec.final_x = traj.samples.back().x;
    rec.final_t = traj.samples.back().t;
    if (obj.known_minimizer) rec.distance_to_minimizer = (rec.final_x - *obj.known_minimizer).norm();
    scan_monotonicity(traj, obj.known_minimizer, rec);

    if (traj.termination == Termination::Converged) {
      const double measured = measure_settling(traj, eps);
      rec.measured_settling = measured;
      rec.status = traj.samples.size() == 1 ? "converged-at-zero-time" : "converged";
      for (PredictionRecord& p : rec.predictions) compare(p, measured, eps, flow);
    } else {
      rec.status = "not-converged";
    }
  } catch (const Error& e) {
    rec.status = "error";
    rec.message = e.what();
  }
  return rec;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  if (cfg.initial_points.empty()) throw ConfigError("experiment needs at least one initial point");
  const int fallback = static_cast<int>(cfg.initial_points.front().size());
  const Objective obj = make_objective(cfg.objective, fallback);
  for (const Vector& x0 : cfg.initial_points) {
    if (x0.size() != obj.dim) throw ConfigError("initial point dimension does not match objective");
  }
  cfg.integrator.validate();

  ExperimentResult result;
  SettlingReport& rep = result.report;
  rep.name = cfg.name;
  rep.objective = obj.name;
  rep.variant = cfg.flow.variant();
  rep.p = cfg.flow.p();
  rep.r = cfg.flow.r();
  rep.prescribed_time = cfg.prescribed_time;
  rep.gnf2_law = cfg.gnf2_law;
  rep.epsilon = cfg.integrator.stop_grad_norm;

  const size_t n = cfg.initial_points.size();
  rep.runs.resize(n);
  result.trajectories.resize(n);
  parallel_for(n, [&](size_t i) {
    rep.runs[i] = run_one(obj, cfg, cfg.initial_points[i], result.trajectories[i]);
  });
  return result;
}

Gnf2Resolution resolve_gnf2_formula(const Objective& obj, const Vector& x0,
                                    const std::vector<double>& p_grid, double c, double r,
                                    const IntegratorOptions& opts, double tolerance) {
  Gnf2Resolution out;
  out.tolerance = tolerance;
  out.per_p.resize(p_grid.size());

  parallel_for(p_grid.size(), [&](size_t i) {
    Gnf2Verdict& v = out.per_p[i];
    v.p = p_grid[i];
    v.verdict = "failed";
    try {
      const FlowConfig flow(FlowVariant::GNF2, c, v.p, r);
      const auto preds = predicted_settling(obj, x0, flow);
      v.paper = {preds.at(0).source, preds.at(0).t_star, std::nullopt, std::nullopt};
      v.derived = {preds.at(1).source, preds.at(1).t_star, std::nullopt, std::nullopt};

      IntegratorOptions run_opts = opts;
      run_opts.t_max = std::max(opts.t_max, 2.0 * std::max(v.paper.t_star, v.derived.t_star) + 1.0);
      const Trajectory traj = integrate(obj, flow, x0, run_opts);
      v.termination = traj.termination;
      if (traj.termination != Termination::Converged) return;

      const double eps = run_opts.stop_grad_norm;
      v.measured = measure_settling(traj, eps);
      compare(v.paper, *v.measured, eps, flow);
      compare(v.derived, *v.measured, eps, flow);
      v.paper_within = *v.paper.rel_error <= tolerance;
      v.derived_within = *v.derived.rel_error <= tolerance;
      if (v.paper_within && v.derived_within) v.verdict = "both";
      else if (v.paper_within) v.verdict = to_string(v.paper.source);
      else if (v.derived_within) v.verdict = to_string(v.derived.source);
      else v.verdict = "neither";
    } catch (const Error&) {
      v.verdict = "failed";
    }
  });

  std::optional<SettlingSource> winner;
  bool consistent = false;
  for (const Gnf2Verdict& v : out.per_p) {
    if (v.p == 1.0) continue;
    std::optional<SettlingSource> this_one;
    if (v.paper_within != v.derived_within) {
      this_one = v.paper_within ? v.paper.source : v.derived.source;
    }
    if (!this_one || (winner && *winner != *this_one)) {
      consistent = false;
      winner.reset();
      break;
    }
    winner = this_one;
    consistent = true;
  }
  if (consistent) out.consistent_winner = winner;
  return out;
}

}  // namespace fintime
