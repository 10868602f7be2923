#include "fintime/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>

#include "CLI11.hpp"
#include "fintime/config.hpp"
#include "fintime/experiments.hpp"
#include "fintime/report.hpp"

namespace fintime {

namespace fs = std::filesystem;

std::vector<std::string> documented_flags(std::string_view subcommand) {
  static const std::map<std::string, std::vector<std::string>, std::less<>> flags = {
      {"run", {"--out", "--force"}},
      {"integrate",
       {"--objective", "--a", "--b", "--q-diag", "--x-star", "--flow", "--c", "--p", "--r", "--T",
        "--gnf2-law", "--x0", "--t-max", "--eps", "--rel-tol", "--abs-tol", "--record-stride", "--csv",
        "--force"}},
      {"validate", {"--points", "--seed"}},
      {"resolve-gnf2",
       {"--objective", "--q-diag", "--x-star", "--x0", "--p-grid", "--c", "--r", "--tol", "--out",
        "--force"}},
  };
  const auto it = flags.find(subcommand);
  return it == flags.end() ? std::vector<std::string>{} : it->second;
}

namespace {

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const Vector& v) {
  std::string s;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt17(v(i));
  return s;
}

class UsageError : public Error {
 public:
  using Error::Error;
};

void check_writable(const fs::path& path, bool force) {
  if (fs::exists(path) && !force) {
    throw UsageError("refusing to overwrite " + path.string() + " (pass --force)");
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

struct ObjectiveFlags {
  std::string name = "rosenbrock";
  double a = 2.0;
  double b = 50.0;
  std::string q_diag;
  std::string x_star;

  ObjectiveSpec spec() const {
    ObjectiveSpec s;
    s.name = name;
    s.a = a;
    s.b = b;
    if (!q_diag.empty()) s.q_diag = parse_list(q_diag);
    if (!x_star.empty()) s.x_star = parse_list(x_star);
    return s;
  }
};

int cmd_run(const std::string& config_path, const std::string& out_override, bool force,
            std::ostream& out) {
  const ExperimentConfig cfg = load_config(config_path);
  const fs::path dir = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);

  std::vector<fs::path> csv_paths;
  for (size_t i = 0; i < cfg.initial_points.size(); ++i) {
    csv_paths.push_back(dir / (cfg.name + "_run" + std::to_string(i + 1) + ".csv"));
  }
  const fs::path report_path = dir / (cfg.name + "_report.json");
  for (const auto& p : csv_paths) check_writable(p, force);
  check_writable(report_path, force);

  const ExperimentResult result = run_experiment(cfg);
  fs::create_directories(dir);
  for (size_t i = 0; i < csv_paths.size(); ++i) {
    std::ostringstream csv;
    write_trajectory_csv(csv, result.trajectories[i]);
    write_file(csv_paths[i], csv.str());
  }
  write_file(report_path, report_to_json(result.report));

  for (size_t i = 0; i < result.report.runs.size(); ++i) {
    const RunRecord& r = result.report.runs[i];
    out << "run " << (i + 1) << ": x0=(" << join(r.x0) << ") " << r.status;
    if (r.measured_settling) out << " settling=" << fmt17(*r.measured_settling);
    for (const auto& p : r.predictions) {
      out << " " << to_string(p.source) << "=" << fmt17(p.t_star);
      if (p.rel_error) out << " (rel err " << *p.rel_error << ")";
    }
    out << "\n";
  }
  out << "wrote " << report_path.string() << "\n";
  return kExitOk;
}

struct IntegrateFlags {
  ObjectiveFlags objective;
  std::string flow = "gnf1";
  double c = 1.0;
  double p = 1.0;
  double r = 0.0;
  std::optional<double> T;
  std::string gnf2_law = "derived";
  std::string x0;
  double t_max = 10.0;
  double eps = 1e-9;
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  int record_stride = 1;
  std::string csv;
  bool force = false;
};

int cmd_integrate(const IntegrateFlags& f, std::ostream& out) {
  const Vector x0 = parse_vector(f.x0);
  const Objective obj = make_objective(f.objective.spec(), static_cast<int>(x0.size()));
  FlowConfig flow(parse_flow_variant(f.flow), f.c, f.p, f.r);
  if (f.T) {
    const Gnf2Law law = f.gnf2_law == "paper" ? Gnf2Law::Paper : Gnf2Law::Derived;
    flow = flow.with_gain(tune_c(obj, x0, flow.p(), flow.variant(), *f.T, law));
  }
  IntegratorOptions opts;
  opts.t_max = f.t_max;
  opts.stop_grad_norm = f.eps;
  opts.rel_tol = f.rel_tol;
  opts.abs_tol = f.abs_tol;
  opts.record_stride = f.record_stride;
  if (!f.csv.empty()) check_writable(f.csv, f.force);

  const Trajectory traj = integrate(obj, flow, x0, opts);
  if (!f.csv.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(f.csv, csv.str());
  }

  const Sample& last = traj.samples.back();
  out << "objective: " << obj.name << "\n";
  out << "flow: " << to_string(flow.variant()) << " c=" << fmt17(flow.c()) << " p=" << fmt17(flow.p())
      << " r=" << fmt17(flow.r()) << "\n";
  out << "termination: " << to_string(traj.termination) << "\n";
  out << "final_t: " << fmt17(last.t) << "\n";
  out << "final_x: " << join(last.x) << "\n";
  out << "final_gnorm2: " << fmt17(last.grad_norm_2) << "\n";
  if (traj.termination == Termination::Converged) {
    out << "measured_settling: " << fmt17(measure_settling(traj, opts.stop_grad_norm)) << "\n";
  }
  if (is_finite_time(flow.variant()) && traj.samples.front().grad_norm_2 > kGradientFloor) {
    for (const auto& p : predicted_settling(obj, x0, flow)) {
      out << "predicted_settling[" << to_string(p.source) << "]: " << fmt17(p.t_star) << "\n";
    }
  }
  return kExitOk;
}

int cmd_validate(int points, unsigned seed, std::ostream& out) {
  constexpr double kGradTol = 1e-4;
  constexpr double kHessTol = 1e-3;
  constexpr double kEnvelopeTol = 1e-4;
  bool ok = true;
  std::mt19937 rng(seed);

  struct Shipped {
    Objective obj;
    double lo;
    double hi;
  };
  std::vector<Shipped> shipped = {
      {rosenbrock({2.0, 50.0}), -3.0, 5.0},
      {rosenbrock({1.0, 100.0}), -2.0, 2.0},
      {rosenbrock({2.0, -1.0}), -3.0, 5.0},
      {quadratic(SymMatrix::diagonal(Vector{{1.0, 4.0}}), Vector::Zero(2)), -5.0, 5.0},
      {quadratic(SymMatrix::identity(3), Vector{{1.0, -2.0, 0.5}}), -5.0, 5.0},
  };
  for (const auto& s : shipped) {
    std::uniform_real_distribution<double> dist(s.lo, s.hi);
    FdErrors worst;
    for (int k = 0; k < points; ++k) {
      Vector x(s.obj.dim);
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = dist(rng);
      const FdErrors e = fd_validate(s.obj, x);
      worst.grad_err = std::max(worst.grad_err, e.grad_err);
      worst.hess_err = std::max(worst.hess_err, e.hess_err);
    }
    const bool pass = worst.grad_err <= kGradTol && worst.hess_err <= kHessTol;
    ok = ok && pass;
    out << (pass ? "PASS" : "FAIL") << " fd_validate " << s.obj.name << " grad_err=" << worst.grad_err
        << " hess_err=" << worst.hess_err << "\n";
  }

  double worst_env = 0.0;
  bool zero_ok = true;
  for (double alpha : {-1.0, 0.0, 0.25, 0.5, 0.9, 1.0, 2.0}) {
    for (double c : {0.5, 1.0, 3.0}) {
      for (double e0 : {0.1, 1.0, 10.0}) {
        const EnvelopeParams params{e0, c, alpha};
        const double t_end = alpha < 1.0 ? 0.95 * settling_time(params) : 2.0;
        constexpr int kTimes = 20;
        constexpr int kSteps = 20000;
        const auto curve = envelope_oracle(params, t_end, kSteps);
        for (int k = 1; k <= kTimes; ++k) {
          const auto& smp = curve[static_cast<size_t>(k * (kSteps / kTimes))];
          const double exact = alpha < 1.0 ? envelope(params, smp.t) : envelope_exp(params, smp.t);
          worst_env = std::max(worst_env, std::abs(smp.value - exact) / exact);
        }
        if (alpha < 1.0 && envelope(params, settling_time(params)) != 0.0) zero_ok = false;
      }
    }
  }
  const bool env_pass = worst_env <= kEnvelopeTol && zero_ok;
  ok = ok && env_pass;
  out << (env_pass ? "PASS" : "FAIL") << " envelope_oracle grid max_rel_err=" << worst_env
      << " zero_at_settling=" << (zero_ok ? "yes" : "no") << "\n";
  return ok ? kExitOk : kExitValidationFailure;
}

struct ResolveFlags {
  ObjectiveFlags objective{"quadratic-identity", 2.0, 50.0, "", ""};
  std::string x0 = "1,1";
  std::string p_grid = "1,1.25,1.5,1.75";
  double c = 1.0;
  double r = 0.0;
  double tol = 0.01;
  std::string out;
  bool force = false;
};

int cmd_resolve(const ResolveFlags& f, std::ostream& out) {
  const Vector x0 = parse_vector(f.x0);
  const Objective obj = make_objective(f.objective.spec(), static_cast<int>(x0.size()));
  if (!f.out.empty()) check_writable(f.out, f.force);
  const Gnf2Resolution res = resolve_gnf2_formula(obj, x0, parse_list(f.p_grid), f.c, f.r, {}, f.tol);
  for (const Gnf2Verdict& v : res.per_p) {
    out << "p=" << v.p << " measured=" << (v.measured ? fmt17(*v.measured) : "n/a")
        << " paper=" << fmt17(v.paper.t_star) << " derived=" << fmt17(v.derived.t_star);
    if (v.paper.rel_error && v.derived.rel_error) {
      out << " paper_err=" << *v.paper.rel_error << " derived_err=" << *v.derived.rel_error;
    }
    out << " verdict=" << v.verdict << "\n";
  }
  out << "consistent winner: " << (res.consistent_winner ? to_string(*res.consistent_winner) : "none")
      << "\n";
  if (!f.out.empty()) write_file(f.out, resolution_to_json(res));
  return res.consistent_winner ? kExitOk : kExitValidationFailure;
}

}  // namespace

int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prescribed finite-time optimization flows"};
  app.name("fintime");
  app.require_subcommand(1);

  std::string config_path;
  std::string run_out;
  bool run_force = false;
  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  run->add_option("config", config_path, "Experiment config file")->required();
  run->add_option("--out", run_out, "Output directory (overrides output_dir)");
  run->add_flag("--force", run_force, "Overwrite existing output files");

  IntegrateFlags ig;
  double ig_T = 0.0;
  auto* integ = app.add_subcommand("integrate", "Integrate a single trajectory");
  integ->add_option("--objective", ig.objective.name, "rosenbrock | quadratic | quadratic-identity")
      ->capture_default_str();
  integ->add_option("--a", ig.objective.a, "Rosenbrock a")->capture_default_str();
  integ->add_option("--b", ig.objective.b, "Rosenbrock b")->capture_default_str();
  integ->add_option("--q-diag", ig.objective.q_diag, "Quadratic diagonal, comma-separated");
  integ->add_option("--x-star", ig.objective.x_star, "Quadratic minimizer, comma-separated");
  integ->add_option("--flow", ig.flow, "gnf1 | gnf2 | gradient | newton")->capture_default_str();
  integ->add_option("--c", ig.c, "Gain c")->capture_default_str();
  integ->add_option("--p", ig.p, "Exponent p in [1, 2)")->capture_default_str();
  integ->add_option("--r", ig.r, "Hessian power r")->capture_default_str();
  auto* ig_T_opt = integ->add_option("--T", ig_T, "Prescribed settling time (tunes c)");
  integ->add_option("--gnf2-law", ig.gnf2_law, "derived | paper (gain tuning for gnf2)")
      ->check(CLI::IsMember({"derived", "paper"}))
      ->capture_default_str();
  integ->add_option("--x0", ig.x0, "Initial point, comma-separated")->required();
  integ->add_option("--t-max", ig.t_max, "Final time")->capture_default_str();
  integ->add_option("--eps", ig.eps, "Stop when the gradient norm reaches this")->capture_default_str();
  integ->add_option("--rel-tol", ig.rel_tol, "Relative tolerance")->capture_default_str();
  integ->add_option("--abs-tol", ig.abs_tol, "Absolute tolerance")->capture_default_str();
  integ->add_option("--record-stride", ig.record_stride, "Record every k-th accepted step")
      ->capture_default_str();
  integ->add_option("--csv", ig.csv, "Write the trajectory CSV here");
  integ->add_flag("--force", ig.force, "Overwrite an existing CSV");

  int points = 20;
  unsigned seed = 1;
  auto* validate = app.add_subcommand("validate", "Check derivatives and the settling envelope");
  validate->add_option("--points", points, "Random points per objective")->capture_default_str();
  validate->add_option("--seed", seed, "Random seed")->capture_default_str();

  ResolveFlags rs;
  auto* resolve = app.add_subcommand("resolve-gnf2", "Decide which gnf2 settling law matches simulation");
  resolve->add_option("--objective", rs.objective.name, "quadratic | quadratic-identity | rosenbrock")
      ->capture_default_str();
  resolve->add_option("--q-diag", rs.objective.q_diag, "Quadratic diagonal, comma-separated");
  resolve->add_option("--x-star", rs.objective.x_star, "Quadratic minimizer, comma-separated");
  resolve->add_option("--x0", rs.x0, "Initial point, comma-separated")->capture_default_str();
  resolve->add_option("--p-grid", rs.p_grid, "Exponents p, comma-separated")->capture_default_str();
  resolve->add_option("--c", rs.c, "Gain c")->capture_default_str();
  resolve->add_option("--r", rs.r, "Hessian power r")->capture_default_str();
  resolve->add_option("--tol", rs.tol, "Relative tolerance for a match")->capture_default_str();
  resolve->add_option("--out", rs.out, "Write the resolution JSON here");
  resolve->add_flag("--force", rs.force, "Overwrite an existing JSON file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    const auto parsed = app.get_subcommands();
    err << (parsed.empty() ? app.help() : parsed.front()->help());
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(config_path, run_out, run_force, out);
    if (*integ) {
      if (ig_T_opt->count() > 0) ig.T = ig_T;
      return cmd_integrate(ig, out);
    }
    if (*validate) return cmd_validate(points, seed, out);
    if (*resolve) return cmd_resolve(rs, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidationFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fintime
