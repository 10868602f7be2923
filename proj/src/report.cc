#include "fintime/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace fintime {

namespace {

using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json number(const std::optional<double>& v) { return v ? number(*v) : ordered_json(nullptr); }

ordered_json vec(const Vector& v) {
  ordered_json arr = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v(i)));
  return arr;
}

ordered_json prediction(const PredictionRecord& p) {
  ordered_json j;
  j["source"] = to_string(p.source);
  j["t_star"] = number(p.t_star);
  j["corrected_measured"] = number(p.corrected_measured);
  j["rel_error"] = number(p.rel_error);
  return j;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.samples.empty() ? 0 : traj.samples.front().x.size();
  out << "t";
  for (Eigen::Index i = 0; i < n; ++i) out << ",x" << (i + 1);
  out << ",f,gnorm2,gnorm1,V\n";
  for (const Sample& s : traj.samples) {
    out << fmt17(s.t);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << fmt17(s.x(i));
    out << ',' << fmt17(s.f) << ',' << fmt17(s.grad_norm_2) << ',' << fmt17(s.grad_norm_1) << ','
        << fmt17(s.V) << '\n';
  }
}

std::string report_to_json(const SettlingReport& report) {
  ordered_json j;
  j["name"] = report.name;
  j["objective"] = report.objective;
  j["flow"] = {{"variant", to_string(report.variant)}, {"p", number(report.p)}, {"r", number(report.r)}};
  j["prescribed_time"] = number(report.prescribed_time);
  j["gnf2_law"] = report.gnf2_law == Gnf2Law::Paper ? "paper" : "derived";
  j["epsilon"] = number(report.epsilon);

  ordered_json runs = ordered_json::array();
  for (size_t i = 0; i < report.runs.size(); ++i) {
    const RunRecord& r = report.runs[i];
    ordered_json run;
    run["index"] = i;
    run["x0"] = vec(r.x0);
    run["c"] = number(r.c);
    run["status"] = r.status;
    run["termination"] = to_string(r.termination);
    run["message"] = r.message;
    run["measured_settling"] = number(r.measured_settling);
    ordered_json preds = ordered_json::array();
    for (const PredictionRecord& p : r.predictions) preds.push_back(prediction(p));
    run["predictions"] = std::move(preds);
    run["final_t"] = number(r.final_t);
    run["final_x"] = vec(r.final_x);
    run["distance_to_minimizer"] = number(r.distance_to_minimizer);
    run["accepted_steps"] = r.accepted_steps;
    run["rejected_steps"] = r.rejected_steps;
    run["grad_norm_nonincreasing"] = r.grad_norm_nonincreasing;
    run["distance_increased"] = r.distance_increased;
    run["value_increased"] = r.value_increased;
    runs.push_back(std::move(run));
  }
  j["runs"] = std::move(runs);
  return j.dump(2) + "\n";
}

std::string resolution_to_json(const Gnf2Resolution& res) {
  ordered_json j;
  j["tolerance"] = number(res.tolerance);
  ordered_json rows = ordered_json::array();
  for (const Gnf2Verdict& v : res.per_p) {
    ordered_json row;
    row["p"] = number(v.p);
    row["termination"] = to_string(v.termination);
    row["measured_settling"] = number(v.measured);
    row["paper"] = prediction(v.paper);
    row["derived"] = prediction(v.derived);
    row["verdict"] = v.verdict;
    rows.push_back(std::move(row));
  }
  j["per_p"] = std::move(rows);
  j["consistent_winner"] = res.consistent_winner ? ordered_json(to_string(*res.consistent_winner))
                                                 : ordered_json(nullptr);
  return j.dump(2) + "\n";
}

}  // namespace fintime
