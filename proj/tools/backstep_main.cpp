// Command-line front end: simulate a scenario, search gain feasibility, or
// validate a scenario file.
#include <string>

#include <CLI11.hpp>

#include "backstep/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"constrained adaptive backstepping toolkit"};
  app.require_subcommand(1);

  std::string scenario, grid;
  backstep::RunOptions opt;

  CLI::App* sim = app.add_subcommand("sim", "simulate a scenario and write run artifacts");
  sim->add_option("scenario", scenario, "scenario file")->required();
  sim->add_option("--out", opt.out_dir, "output directory (default .)");
  sim->add_option("--stride", opt.stride, "output decimation (default: scenario stride)");

  CLI::App* feas = app.add_subcommand("feas", "gain feasibility search over a candidate grid");
  feas->add_option("scenario", scenario, "scenario file")->required();
  feas->add_option("--grid", grid, "candidate grid file")->required();
  feas->add_option("--out", opt.out_dir, "output directory (default .)");
  feas->add_option("--threads", opt.threads, "worker threads (default: grid file / hardware)");

  CLI::App* validate = app.add_subcommand("validate", "check a scenario file");
  validate->add_option("scenario", scenario, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return backstep::kExitConfig;
  }

  if (sim->parsed()) return backstep::run_simulation(scenario, opt);
  if (feas->parsed()) return backstep::run_feasibility(scenario, grid, opt);
  return backstep::run_validate(scenario);
}
