#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "backstep/controller.hpp"
#include "backstep/plant.hpp"
#include "backstep/reference.hpp"

namespace backstep {

// Closed-loop co-simulation setup: the true plant is driven by the exactly
// delayed input (a sample delay line), while the controller only ever sees
// its first-order delay surrogate.
struct SimConfig {
  PlantModel plant;
  ControllerGains gains;
  std::vector<FuzzyBasis> bases;  // one per stage
  ReferenceSignal ref;

  double tau = 0.0;  // actuation delay; must be an exact multiple of h
  double h = 1e-4;   // fixed integration step
  double T = 0.0;    // horizon

  std::vector<double> x0;
  AdaptiveState adapt0;
  double u0 = 0.0;
  double chi0 = 0.0;
  bool chi0_is_default = true;  // default chi(0) = 2 u(0), the surrogate's rest point

  [[nodiscard]] double chi_initial() const { return chi0_is_default ? 2.0 * u0 : chi0; }

  // Full load-time validation, including the surface-filter initialization
  // (initial barrier violations surface here as ConfigError, not as runtime
  // BarrierViolation).  Throws ConfigError.
  void validate() const;
};

struct Trajectory {
  int n = 0;
  double h = 0.0;
  std::vector<double> k_b, k_c;  // copied from the run for reports/plots

  std::vector<double> t;
  std::vector<std::vector<double>> x;          // n columns
  std::vector<std::vector<double>> z;          // n+1 columns
  std::vector<std::vector<double>> e;          // n columns (e_2..e_{n+1})
  std::vector<std::vector<double>> w;          // n columns (w_2..w_{n+1})
  std::vector<std::vector<double>> alpha;      // n columns
  std::vector<std::vector<double>> margin;     // n columns, k_bi^2 - z_i^2
  std::vector<std::vector<double>> delta_hat;  // n columns
  std::vector<std::vector<double>> theta_hat;  // n columns
  std::vector<double> u, u_delayed, chi, v;
  std::vector<double> Vs;  // boundedness surrogate, see lyapunov_surrogate()

  std::vector<double> y_d;  // reference samples (for tracking-error reports)

  [[nodiscard]] std::size_t samples() const { return t.size(); }
};

// Classical fixed-step fourth-order Runge-Kutta, one step.
std::vector<double> rk4_step(
    const std::function<void(double, std::span<const double>, std::span<double>)>& f, double t,
    std::span<const double> state, double h);

// Runs the closed loop on the uniform grid t_k = k h, recording every step
// (decimation is an output concern).  The delayed input is read once per
// step and held across the four stages.  Throws BarrierViolation /
// SimulationDiverged with the failure time attached.
Trajectory simulate(const SimConfig& cfg);

// sum_i ln(k_bi^2/(k_bi^2 - z_i^2)) + z_{n+1}^2 + sum_i e_{i+1}^2 per sample;
// the logarithmic terms blow up exactly when a barrier is approached, so a
// finite, eventually non-increasing sequence certifies constrained
// boundedness.
std::vector<double> lyapunov_surrogate(const Trajectory& traj);
double lyapunov_surrogate_sample(std::span<const double> z, std::span<const double> e,
                                 std::span<const double> k_b);

struct ConstraintEntry {
  std::string name;
  double value = 0.0;  // attained extremum
  double bound = 0.0;  // the limit it is checked against
  bool pass = false;
};

struct ConstraintReport {
  std::vector<double> x_sup;        // per state
  std::vector<double> z_sup;        // per tracking coordinate 1..n
  std::vector<double> margin_min;   // min over t of (k_bi - |z_i|)
  std::vector<double> rho;          // rho_1 = A0, rho_i = sup |w_i| for i >= 2
  std::vector<ConstraintEntry> entries;
  bool pass = false;
};

// Checks |x_i| < k_ci and |z_i| < k_bi pointwise, and the containment chain
// |x_i| <= k_bi + rho_i that links the two boxes (rho_1 = A0 = sup |y_d|).
ConstraintReport check_constraints(const Trajectory& traj, double A0);

}  // namespace backstep
