#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fintime/config.hpp"
#include "fintime/integrator.hpp"
#include "fintime/lyapunov.hpp"

namespace fintime {

/// One closed-form prediction compared against the measured settling time.
/// The measurement stops at gradient norm epsilon, so it is compared after
/// adding the time the same law predicts for the remaining descent from
/// epsilon to zero.
struct PredictionRecord {
  SettlingSource source = SettlingSource::Eq8Gnf1;
  double t_star = 0.0;
  std::optional<double> corrected_measured;
  std::optional<double> rel_error;  // |corrected - t_star| / t_star
};

struct RunRecord {
  Vector x0;
  double c = 0.0;
  std::vector<PredictionRecord> predictions;
  std::optional<double> measured_settling;
  Termination termination = Termination::TMaxReached;
  std::string status;  // converged | converged-at-zero-time | not-converged | error
  std::string message;
  Vector final_x;
  double final_t = 0.0;
  std::optional<double> distance_to_minimizer;
  std::int64_t accepted_steps = 0;
  std::int64_t rejected_steps = 0;
  bool grad_norm_nonincreasing = true;
  bool distance_increased = false;
  bool value_increased = false;
};

struct SettlingReport {
  std::string name;
  std::string objective;
  FlowVariant variant = FlowVariant::GNF1;
  double p = 1.0;
  double r = 0.0;
  std::optional<double> prescribed_time;
  Gnf2Law gnf2_law = Gnf2Law::Derived;
  double epsilon = 0.0;
  std::vector<RunRecord> runs;
};

struct ExperimentResult {
  SettlingReport report;
  std::vector<Trajectory> trajectories;  // same order as the config's initial points
};

inline constexpr double kMonotoneSlack = 1e-9;

/// Worker count: FINTIME_THREADS when set to a positive integer, otherwise
/// the number of logical processors.
unsigned worker_count();

/// Runs fn(0..n-1) on up to worker_count() threads. fn must not throw.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

/// Tunes (if a prescribed time is set), integrates, measures and compares
/// every initial point. A failing run is recorded, never propagated.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct Gnf2Verdict {
  double p = 1.0;
  Termination termination = Termination::TMaxReached;
  std::optional<double> measured;
  PredictionRecord paper;
  PredictionRecord derived;
  bool paper_within = false;
  bool derived_within = false;
  std::string verdict;  // a source name, "both", "neither" or "failed"
};

struct Gnf2Resolution {
  double tolerance = 0.01;
  std::vector<Gnf2Verdict> per_p;
  /// Set when every p != 1 entry singles out the same source.
  std::optional<SettlingSource> consistent_winner;
};

/// Integrates GNF2 for each p and reports which of the two closed-form
/// settling laws lands within `tolerance` (relative) of the measurement.
Gnf2Resolution resolve_gnf2_formula(const Objective& obj, const Vector& x0,
                                    const std::vector<double>& p_grid, double c, double r,
                                    const IntegratorOptions& opts = {}, double tolerance = 0.01);

}  // namespace fintime
