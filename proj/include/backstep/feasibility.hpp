#pragma once

#include <string>
#include <vector>

#include "backstep/sim.hpp"

namespace backstep {

// Gain feasibility: a candidate sigma = (K_1..K_{n-1}, k_b2..k_bn) is
// feasible when, over the sampled initial states,
//   (a) k_ci > rho_i(sigma) + k_bi for every i (rho_1 = A0, rho_i = sup |w_i|),
//   (b) k_bi > |x_i(0) - alpha_{i-1}(0)| at every sampled initial state,
// and every sample run completes without barrier violation or divergence.
// The search maximizes N(sigma) = sum K_j + sum k_bj over a finite grid.
struct FeasibilityProblem {
  SimConfig base;  // fixed gains (K_n, K_{n+1}, k_b1, ...) and everything else

  // Candidate values per searched component; sizes n-1 each.  K_grid[j]
  // lists candidates for K_{j+1}; kb_grid[j] lists candidates for k_b{j+2}.
  std::vector<std::vector<double>> K_grid;
  std::vector<std::vector<double>> kb_grid;

  // Initial states for rho estimation.  Empty => generated per candidate:
  // the scenario x(0), plus the z-box center and corners at init_fraction of
  // the candidate's k_b (mapped through the surface-filter initialization so
  // corner samples respect the barriers by construction).
  std::vector<std::vector<double>> init_samples;
  double init_fraction = 0.5;

  int threads = 0;  // 0 => hardware concurrency
};

struct CandidateResult {
  std::vector<double> sigma;   // the candidate itself
  bool feasible = false;
  double N = 0.0;              // objective, sum of sigma
  std::vector<double> rho;     // rho_1..rho_n (rho_1 = A0); empty when unavailable
  std::string violated;        // first violated constraint, empty when feasible
  double violation = 0.0;      // by how much (for the "tightest constraint" report)
};

struct FeasibilityResult {
  CandidateResult best;
  std::vector<CandidateResult> evaluated;  // grid order
};

// sup_t |w_i| per coordinate across simulation runs from each initial state;
// result[0] is A0 (w_1 is the reference itself).  Runs are independent and
// may execute in parallel at the call site.
std::vector<double> estimate_rho(const SimConfig& cfg,
                                 const std::vector<std::vector<double>>& init_samples);

// Exhaustive deterministic grid search; ties on N broken toward the
// lexicographically smallest candidate.  Throws EmptyFeasibleSet (naming the
// constraint that came closest to holding) when nothing on the grid works.
FeasibilityResult feasibility_search(const FeasibilityProblem& problem);

struct PrereqReport {
  double A0 = 0.0;
  std::vector<ConstraintEntry> entries;
  bool pass = false;
};

// Static prerequisites of a scenario: the reference stays clear of the first
// constraint box (k_c1 > A0 + k_b1), the initial state sits inside its boxes
// and barriers, and timing/gain sanity.  Nothing here runs a simulation.
PrereqReport verify_prerequisites(const SimConfig& cfg);

}  // namespace backstep
