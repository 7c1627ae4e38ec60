#include "backstep/runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "backstep/errors.hpp"
#include "backstep/io.hpp"
#include "backstep/scenario.hpp"

namespace backstep {

namespace {

namespace fs = std::filesystem;

std::string joined(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write \"" + path + "\"");
  out << text;
}

int to_exit_code(const std::exception& ex) {
  if (dynamic_cast<const BarrierViolation*>(&ex)) return kExitBarrier;
  if (dynamic_cast<const SimulationDiverged*>(&ex)) return kExitDiverged;
  if (dynamic_cast<const EmptyFeasibleSet*>(&ex)) return kExitInfeasible;
  return kExitConfig;
}

}  // namespace

int run_simulation(const std::string& scenario_path, const RunOptions& opt) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    SimConfig cfg = build_sim_config(sc);
    cfg.validate();

    fs::create_directories(opt.out_dir);
    const Trajectory traj = simulate(cfg);

    const int stride = opt.stride > 0 ? opt.stride : sc.stride;
    write_trajectory_csv(traj, joined(opt.out_dir, "trajectory.csv"), stride);
    write_plot_script(traj, "trajectory.csv", joined(opt.out_dir, "plots.gp"));

    const ConstraintReport rep = check_constraints(traj, cfg.ref.A0);
    const PrereqReport pre = verify_prerequisites(cfg);
    print_constraint_report(rep, std::cout);
    print_prereq_report(pre, std::cout);
    write_text(joined(opt.out_dir, "report.json"), constraint_report_json(rep, pre));
    {
      std::ofstream out(joined(opt.out_dir, "report.txt"), std::ios::binary);
      print_constraint_report(rep, out);
      print_prereq_report(pre, out);
    }
    return kExitOk;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return to_exit_code(ex);
  }
}

int run_feasibility(const std::string& scenario_path, const std::string& grid_path,
                    const RunOptions& opt) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    const GridSpec grid = load_grid(grid_path, sc.n);
    FeasibilityProblem problem = build_feasibility_problem(sc, grid);
    if (opt.threads > 0) problem.threads = opt.threads;
    problem.base.validate();

    const FeasibilityResult res = feasibility_search(problem);

    fs::create_directories(opt.out_dir);
    print_feasibility_result(res, std::cout);
    {
      std::ofstream out(joined(opt.out_dir, "feasibility.txt"), std::ios::binary);
      print_feasibility_result(res, out);
    }
    write_text(joined(opt.out_dir, "feasibility.json"), feasibility_result_json(res));
    return kExitOk;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return to_exit_code(ex);
  }
}

int run_validate(const std::string& scenario_path) {
  try {
    const Scenario sc = load_scenario(scenario_path);
    SimConfig cfg = build_sim_config(sc);
    cfg.validate();
    const PrereqReport pre = verify_prerequisites(cfg);
    std::cout << "scenario ok: n = " << sc.n << ", tau = " << cfg.tau << ", h = " << cfg.h
              << ", T = " << cfg.T << "\n";
    print_prereq_report(pre, std::cout);
    return kExitOk;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return to_exit_code(ex);
  }
}

}  // namespace backstep
