#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fintime/flows.hpp"
#include "fintime/integrator.hpp"

namespace fintime {

/// Named objective plus its parameters.
///   rosenbrock          uses a, b
///   quadratic           uses q_diag (or full row-major q) and x_star
///   quadratic-identity  Q = I of dimension dim, x_star (default 0)
struct ObjectiveSpec {
  std::string name = "rosenbrock";
  double a = 2.0;
  double b = 50.0;
  std::vector<double> q_diag;
  std::vector<double> q_full;
  std::vector<double> x_star;
  int dim = 0;  // 0: infer from x_star / q / initial points
};

Objective make_objective(const ObjectiveSpec& spec, int fallback_dim = 0);

struct ExperimentConfig {
  std::string name = "experiment";
  ObjectiveSpec objective;
  FlowConfig flow{FlowVariant::GNF1, 1.0, 1.0, 0.0};
  std::vector<Vector> initial_points;
  std::optional<double> prescribed_time;
  Gnf2Law gnf2_law = Gnf2Law::Derived;
  IntegratorOptions integrator;
  std::string output_dir = ".";
};

/// Comma-separated reals without spaces, e.g. "0,4.5". Throws ConfigError.
Vector parse_vector(std::string_view text);
std::vector<double> parse_list(std::string_view text);

/// Reads the flat `key = value` format documented in the README.
/// Blank lines and lines starting with '#' are ignored; `x0` may repeat.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

}  // namespace fintime
