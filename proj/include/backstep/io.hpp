#pragma once

#include <iosfwd>
#include <string>

#include "backstep/feasibility.hpp"
#include "backstep/sim.hpp"

namespace backstep {

// Column layout (n states):
//   t, x1..xn, z1..z{n+1}, u, u_delayed, chi, v, alpha1..alphan,
//   delta_hat1..delta_hatn, theta_hat1..theta_hatn, Vs
// Decimal text, 15 significant digits; `stride` keeps every stride-th row
// starting at t = 0.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out, int stride = 1);
void write_trajectory_csv(const Trajectory& traj, const std::string& path, int stride = 1);

void print_constraint_report(const ConstraintReport& rep, std::ostream& out);
void print_prereq_report(const PrereqReport& rep, std::ostream& out);
void print_feasibility_result(const FeasibilityResult& res, std::ostream& out);

// Machine-readable mirrors of the reports above.
std::string constraint_report_json(const ConstraintReport& rep, const PrereqReport& prereq);
std::string feasibility_result_json(const FeasibilityResult& res);

// gnuplot script rendering the run: tracking with its constraint band, the
// remaining states with theirs, tracking coordinates against the barriers,
// the input-filter command, actual vs delayed input, and the adaptive
// estimates.  Reads the CSV written next to it.
void write_plot_script(const Trajectory& traj, const std::string& csv_name,
                       const std::string& path);

}  // namespace backstep
