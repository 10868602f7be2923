#include "fintime/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fintime {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text) {
  const std::string owned(trim(text));
  if (owned.empty()) throw ConfigError("expected a number, got empty text");
  size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(owned, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + owned + "'");
  }
  if (used != owned.size()) throw ConfigError("not a number: '" + owned + "'");
  return value;
}

std::int64_t parse_integer(std::string_view text) {
  const std::string_view t = trim(text);
  std::int64_t value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("not an integer: '" + std::string(t) + "'");
  }
  return value;
}

}  // namespace

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) throw ConfigError("empty vector");
  size_t start = 0;
  while (true) {
    const size_t comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Vector parse_vector(std::string_view text) {
  const std::vector<double> v = parse_list(text);
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Objective make_objective(const ObjectiveSpec& spec, int fallback_dim) {
  if (spec.name == "rosenbrock") return rosenbrock({spec.a, spec.b});

  if (spec.name == "quadratic" || spec.name == "quadratic-identity") {
    Eigen::Index n = spec.dim;
    if (n == 0 && !spec.x_star.empty()) n = static_cast<Eigen::Index>(spec.x_star.size());
    if (n == 0 && !spec.q_diag.empty()) n = static_cast<Eigen::Index>(spec.q_diag.size());
    if (n == 0 && !spec.q_full.empty()) {
      n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(spec.q_full.size()))));
    }
    if (n == 0 && fallback_dim > 0) n = fallback_dim;
    if (n <= 0) throw ConfigError("cannot determine quadratic dimension");

    Matrix q;
    if (spec.name == "quadratic-identity") {
      q = Matrix::Identity(n, n);
    } else if (!spec.q_full.empty()) {
      if (static_cast<Eigen::Index>(spec.q_full.size()) != n * n) {
        throw ConfigError("q must list n*n entries in row-major order");
      }
      q = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          spec.q_full.data(), n, n);
    } else if (!spec.q_diag.empty()) {
      if (static_cast<Eigen::Index>(spec.q_diag.size()) != n) throw ConfigError("q_diag has wrong length");
      q = Eigen::Map<const Vector>(spec.q_diag.data(), n).asDiagonal();
    } else {
      throw ConfigError("quadratic objective needs q_diag or q");
    }

    Vector x_star = Vector::Zero(n);
    if (!spec.x_star.empty()) {
      if (static_cast<Eigen::Index>(spec.x_star.size()) != n) throw ConfigError("x_star has wrong length");
      x_star = Eigen::Map<const Vector>(spec.x_star.data(), n);
    }
    Objective obj = quadratic(SymMatrix(q), x_star);
    obj.name = spec.name;
    return obj;
  }
  throw ConfigError("unknown objective '" + spec.name + "' (expected rosenbrock, quadratic, quadratic-identity)");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string variant = "gnf1";
  double c = 1.0, p = 1.0, r = 0.0;
  std::set<std::string> seen;
  const std::set<std::string> repeatable = {"x0"};

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));
    if (!repeatable.count(key) && !seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }

    try {
      auto& io = cfg.integrator;
      if (key == "name") cfg.name = std::string(value);
      else if (key == "objective") cfg.objective.name = std::string(value);
      else if (key == "a") cfg.objective.a = parse_real(value);
      else if (key == "b") cfg.objective.b = parse_real(value);
      else if (key == "q_diag") cfg.objective.q_diag = parse_list(value);
      else if (key == "q") cfg.objective.q_full = parse_list(value);
      else if (key == "x_star") cfg.objective.x_star = parse_list(value);
      else if (key == "dim") cfg.objective.dim = static_cast<int>(parse_integer(value));
      else if (key == "flow") variant = std::string(value);
      else if (key == "c") c = parse_real(value);
      else if (key == "p") p = parse_real(value);
      else if (key == "r") r = parse_real(value);
      else if (key == "prescribed_time") cfg.prescribed_time = parse_real(value);
      else if (key == "gnf2_law") {
        if (value == "derived") cfg.gnf2_law = Gnf2Law::Derived;
        else if (value == "paper") cfg.gnf2_law = Gnf2Law::Paper;
        else throw ConfigError("gnf2_law must be 'derived' or 'paper'");
      }
      else if (key == "x0") cfg.initial_points.push_back(parse_vector(value));
      else if (key == "rel_tol") io.rel_tol = parse_real(value);
      else if (key == "abs_tol") io.abs_tol = parse_real(value);
      else if (key == "h_init") io.h_init = parse_real(value);
      else if (key == "h_min") io.h_min = parse_real(value);
      else if (key == "h_max") io.h_max = parse_real(value);
      else if (key == "epsilon") io.stop_grad_norm = parse_real(value);
      else if (key == "t_max") io.t_max = parse_real(value);
      else if (key == "max_steps") io.max_steps = parse_integer(value);
      else if (key == "record_stride") io.record_stride = static_cast<int>(parse_integer(value));
      else if (key == "output_dir") cfg.output_dir = std::string(value);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }

  cfg.flow = FlowConfig(parse_flow_variant(variant), c, p, r);
  cfg.integrator.validate();
  if (cfg.initial_points.empty()) throw ConfigError("config lists no initial points (x0)");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

}  // namespace fintime
