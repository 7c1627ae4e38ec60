// End-to-end runner tests: exit codes, emitted artifacts, and report text.
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "backstep/runner.hpp"

namespace fs = std::filesystem;
using namespace backstep;

namespace {

// A fresh scratch directory per test case; removed on destruction.
struct Scratch {
  fs::path dir;
  explicit Scratch(const char* tag) {
    static int seq = 0;
    dir = fs::temp_directory_path() /
          ("backstep_runner_" + std::string(tag) + "_" + std::to_string(seq++));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path file(const std::string& name, const std::string& text) const {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
  }
};

std::string quick_scenario() {
  return "plant = example\n"
         "ref = 1.5*sin(t) + cos(t)\n"
         "K = 4.9, 10.2, 20\n"
         "k_b = 2, 5\n"
         "sigma = 10, 8\n"
         "gamma = 10\n"
         "beta = 10\n"
         "upsilon = 0.1\n"
         "filter_tau = 0.002\n"
         "kappa = 0.0001\n"
         "lambda = 100\n"
         "tau = 0.01\n"
         "h = 1e-3\n"
         "T = 0.2\n"
         "x0 = 0.5, 0\n"
         "delta0 = 0.01\n"
         "theta0 = 0.01\n";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("successful run exits 0 and writes all four artifacts") {
  Scratch scratch("ok");
  fs::path cfg = scratch.file("scenario.cfg", quick_scenario());
  RunOptions opt;
  opt.out_dir = scratch.dir.string();
  CHECK(run_simulation(cfg.string(), opt) == kExitOk);

  CHECK(fs::exists(scratch.dir / "trajectory.csv"));
  CHECK(fs::exists(scratch.dir / "plots.gp"));
  CHECK(fs::exists(scratch.dir / "report.txt"));
  CHECK(fs::exists(scratch.dir / "report.json"));

  std::string csv = slurp(scratch.dir / "trajectory.csv");
  const std::string header =
      "t,x1,x2,z1,z2,z3,u,u_delayed,chi,v,alpha1,alpha2,delta_hat1,delta_hat2,theta_hat1,"
      "theta_hat2,Vs";
  CHECK(csv.substr(0, header.size()) == header);
  // 201 samples at stride 1, plus the header line.
  CHECK(count_lines(csv) == 202);

  std::string report = slurp(scratch.dir / "report.txt");
  CHECK(report.find("constraint check: PASS") != std::string::npos);
  CHECK(report.find("sup|x1| < k_c1") != std::string::npos);
  CHECK(report.find("prerequisites (A0 = ") != std::string::npos);

  std::string json = slurp(scratch.dir / "report.json");
  CHECK(json.find("\"pass\": true") != std::string::npos);
  CHECK(json.find("\"prerequisites\"") != std::string::npos);

  std::string gp = slurp(scratch.dir / "plots.gp");
  CHECK(gp.find("set output 'tracking.png'") != std::string::npos);
  CHECK(gp.find("set output 'adaptation.png'") != std::string::npos);
  CHECK(gp.find("trajectory.csv") != std::string::npos);
}

TEST_CASE("stride override thins the CSV without touching the report") {
  Scratch scratch("stride");
  fs::path cfg = scratch.file("scenario.cfg", quick_scenario());
  RunOptions opt;
  opt.out_dir = scratch.dir.string();
  opt.stride = 10;
  CHECK(run_simulation(cfg.string(), opt) == kExitOk);
  std::string csv = slurp(scratch.dir / "trajectory.csv");
  // Samples 0,10,...,200 survive: 21 rows plus the header.
  CHECK(count_lines(csv) == 22);
}

TEST_CASE("configuration problems exit 2") {
  Scratch scratch("cfg");
  RunOptions opt;
  opt.out_dir = scratch.dir.string();

  SUBCASE("unknown key") {
    fs::path cfg = scratch.file("bad.cfg", quick_scenario() + "bogus = 1\n");
    CHECK(run_simulation(cfg.string(), opt) == kExitConfig);
  }
  SUBCASE("missing file") {
    CHECK(run_simulation((scratch.dir / "missing.cfg").string(), opt) == kExitConfig);
  }
  SUBCASE("initial state outside the barrier") {
    std::string text = quick_scenario();
    text.replace(text.find("ref = 1.5*sin(t) + cos(t)"), 25, "ref = 3\n# pad line padding..");
    fs::path cfg = scratch.file("barrier0.cfg", text);
    CHECK(run_simulation(cfg.string(), opt) == kExitConfig);
  }
  // No artifacts on failure.
  CHECK_FALSE(fs::exists(scratch.dir / "trajectory.csv"));
}

TEST_CASE("runtime barrier violation exits 3") {
  Scratch scratch("barrier");
  std::string text =
      "plant = example\n"
      "ref = 3*sin(t)\n"
      "K = 0.1, 0.1, 0.1\n"
      "k_b = 2, 5\n"
      "sigma = 10, 8\n"
      "gamma = 10\n"
      "beta = 10\n"
      "upsilon = 0.1\n"
      "filter_tau = 0.01\n"
      "kappa = 0.0001\n"
      "lambda = 200\n"
      "tau = 0.01\n"
      "h = 1e-3\n"
      "T = 2\n"
      "x0 = 0, 0\n"
      "delta0 = 0.01\n"
      "theta0 = 0.01\n";
  fs::path cfg = scratch.file("weak.cfg", text);
  RunOptions opt;
  opt.out_dir = scratch.dir.string();
  CHECK(run_simulation(cfg.string(), opt) == kExitBarrier);
}

TEST_CASE("divergence exits 4") {
  Scratch scratch("diverge");
  // Benchmark gains with a sluggish last filter: the command loop rings up
  // through the actuation delay instead of settling.
  std::string text = quick_scenario();
  text.replace(text.find("filter_tau = 0.002"), 18, "filter_tau = 0.010");
  text.replace(text.find("T = 0.2"), 7, "T = 0.5");
  fs::path cfg = scratch.file("explode.cfg", text);
  RunOptions opt;
  opt.out_dir = scratch.dir.string();
  CHECK(run_simulation(cfg.string(), opt) == kExitDiverged);
}

TEST_CASE("feasibility run writes artifacts on success and exits 5 when empty") {
  Scratch scratch("feas");
  // Short horizon keeps A0 small enough for the builtin bounds.
  std::string text = quick_scenario();
  text.replace(text.find("T = 0.2"), 7, "T = 0.4");
  fs::path cfg = scratch.file("scenario.cfg", text);
  RunOptions opt;
  opt.out_dir = scratch.dir.string();

  SUBCASE("feasible grid") {
    fs::path grid = scratch.file("grid.cfg",
                                 "K1 = 1.0\n"
                                 "kb2 = 2.5\n"
                                 "init_fraction = 0.5\n");
    CHECK(run_feasibility(cfg.string(), grid.string(), opt) == kExitOk);
    CHECK(fs::exists(scratch.dir / "feasibility.txt"));
    CHECK(fs::exists(scratch.dir / "feasibility.json"));
    std::string report = slurp(scratch.dir / "feasibility.txt");
    CHECK(report.find("feasible candidates: 1 of 1") != std::string::npos);
    CHECK(report.find("best: N = 3.5") != std::string::npos);
  }
  SUBCASE("empty feasible set") {
    fs::path grid = scratch.file("grid.cfg",
                                 "K1 = 4.9\n"
                                 "kb2 = 2.5\n"
                                 "init_fraction = 0.5\n");
    CHECK(run_feasibility(cfg.string(), grid.string(), opt) == kExitInfeasible);
    CHECK_FALSE(fs::exists(scratch.dir / "feasibility.txt"));
  }
  SUBCASE("bad grid file") {
    fs::path grid = scratch.file("grid.cfg", "K1 = 1.0\n");
    CHECK(run_feasibility(cfg.string(), grid.string(), opt) == kExitConfig);
  }
}

TEST_CASE("validate reports findings without failing the exit code") {
  Scratch scratch("validate");
  std::string text = quick_scenario();
  // The full-length horizon violates the first containment prerequisite, but
  // `validate` still exits 0: it only reports.
  text.replace(text.find("T = 0.2"), 7, "T = 20\n");
  fs::path cfg = scratch.file("scenario.cfg", text);
  CHECK(run_validate(cfg.string()) == kExitOk);

  CHECK(run_validate((scratch.dir / "nope.cfg").string()) == kExitConfig);
  fs::path bad = scratch.file("bad.cfg", "plant = example\n");
  CHECK(run_validate(bad.string()) == kExitConfig);
}
