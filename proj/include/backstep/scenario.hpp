#pragma once

#include <string>
#include <vector>

#include "backstep/feasibility.hpp"
#include "backstep/sim.hpp"

namespace backstep {

// Flat `key = value` scenario text.  '#' starts a comment; values are
// scalars, comma-separated lists, or expression strings depending on the
// key.  Unknown and duplicated keys are rejected with the offending line.
//
// Keys (n = state dimension):
//   plant      "example" | "expressions"
//   n          int (required for expressions; optional check for example)
//   f1..fn     state equations (expressions plant only)
//   d1..dn     disturbance expressions in t (optional)
//   d_bound    declared disturbance bounds (optional; sampled sup otherwise)
//   k_c        constraint half-widths (expressions plant only; builtin is fixed)
//   ref        reference expression in t
//   K          n+1 gains        k_b        n barrier half-widths
//   sigma gamma beta upsilon    n entries each, or one value broadcast
//   filter_tau n entries or broadcast     kappa   scalar
//   lambda     scalar, optional (default 2/tau)
//   tau h T    timing (h defaults to 1e-4)
//   x0         n entries        delta0 theta0   n entries or broadcast
//   u0 chi0    optional scalars (defaults 0 and 2*u0)
//   fls_counts centers per fuzzy-grid dimension (default 5)
//   fls_w_range  half-range of the filter-derivative input dims (default 10)
//   stride     default output decimation (default 1)
struct Scenario {
  std::string plant_kind = "example";
  int n = 0;
  std::vector<std::string> f_exprs, d_exprs;
  std::vector<double> d_bound, k_c;
  std::string ref_expr;

  std::vector<double> K, k_b, sigma, gamma, beta, upsilon, filter_tau;
  double kappa = 0.0;
  double lambda = 0.0;  // 0 => default 2/tau
  double tau = 0.0, h = 1e-4, T = 0.0;

  std::vector<double> x0, delta0, theta0;
  double u0 = 0.0, chi0 = 0.0;
  bool chi0_given = false;

  int fls_counts = 5;
  double fls_w_range = 10.0;
  int stride = 1;
};

Scenario parse_scenario(const std::string& text, const std::string& source_name);
Scenario load_scenario(const std::string& path);

// Realizes the scenario: builds the plant, reference (with bounds over
// [0, T]), fuzzy grid bases, and gain set.  Throws ConfigError.
SimConfig build_sim_config(const Scenario& sc);

// Candidate grid file for the feasibility search: keys K1..K{n-1} and
// kb2..kbn (each a list), optional init_fraction and threads.
struct GridSpec {
  std::vector<std::vector<double>> K_grid, kb_grid;
  double init_fraction = 0.5;
  int threads = 0;
};

GridSpec parse_grid(const std::string& text, const std::string& source_name, int n);
GridSpec load_grid(const std::string& path, int n);

FeasibilityProblem build_feasibility_problem(const Scenario& sc, const GridSpec& grid);

}  // namespace backstep
