#pragma once

#include <string>

namespace backstep {

// CLI process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitBarrier = 3;
inline constexpr int kExitDiverged = 4;
inline constexpr int kExitInfeasible = 5;

struct RunOptions {
  std::string out_dir = ".";
  int stride = 0;   // 0 => the scenario's own stride
  int threads = 0;  // feasibility only; 0 => grid-file / hardware default
};

// Simulates a scenario and writes trajectory.csv, report.txt, report.json,
// and plots.gp into out_dir.  Returns an exit code.
int run_simulation(const std::string& scenario_path, const RunOptions& opt);

// Gain feasibility search; writes feasibility.txt / feasibility.json.
int run_feasibility(const std::string& scenario_path, const std::string& grid_path,
                    const RunOptions& opt);

// Loads, validates, and prints the prerequisite report; exit 0 iff the
// scenario is runnable (prerequisite findings are reported, not fatal).
int run_validate(const std::string& scenario_path);

}  // namespace backstep
