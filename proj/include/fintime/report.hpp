#pragma once

#include <iosfwd>
#include <string>

#include "fintime/experiments.hpp"

namespace fintime {

/// Header `t,x1,...,xn,f,gnorm2,gnorm1,V`, one row per sample, 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Report JSON; layout documented in the README. Non-finite numbers become null.
std::string report_to_json(const SettlingReport& report);
std::string resolution_to_json(const Gnf2Resolution& res);

}  // namespace fintime
