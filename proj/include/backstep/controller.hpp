#pragma once

#include <span>
#include <vector>

#include "backstep/fls.hpp"

namespace backstep {

// Fraction of k_b^2 kept as a numeric guard band inside each barrier: the
// quotients z/(k_b^2 - z^2) stop being meaningful when the margin reaches
// rounding scale, so operations fail loudly a little before that.
inline constexpr double kBarrierGuardFraction = 1e-9;

// Gains for an n-state plant.  Index conventions follow the coordinate
// change: K has n+1 entries (one per tracking coordinate, including the
// delay-surrogate coordinate), k_b has n (only z_1..z_n are barrier
// constrained), filter_tau holds tau_2..tau_{n+1}.
struct ControllerGains {
  std::vector<double> K;           // n+1, > 0
  std::vector<double> k_b;         // n, > 0
  std::vector<double> sigma;       // n, > 0 (leakage)
  std::vector<double> gamma;       // n, > 0 (delta-hat rate)
  std::vector<double> beta;        // n, > 0 (theta-hat rate)
  std::vector<double> upsilon;     // n, > 0 (tanh sharpness)
  std::vector<double> filter_tau;  // n, > 0 (surface filter constants)
  double kappa = 0.0;              // input low-pass gain, > 0
  double lambda = 0.0;             // delay-surrogate pole, > 0 (2/tau unless overridden)

  void validate(int n) const;  // throws ConfigError
};

// Scalar adaptive estimates, one pair per stage; both stay positive whenever
// they start positive (the laws have nonnegative drive and linear leakage).
struct AdaptiveState {
  std::vector<double> delta_hat;
  std::vector<double> theta_hat;
};

// Everything one controller pass produces at a given state and time.
struct ControlOutput {
  std::vector<double> z;          // z_1..z_{n+1}
  std::vector<double> margin;     // k_bi^2 - z_i^2, i = 1..n (all past the guard band)
  std::vector<double> e;          // e_2..e_{n+1} (filter minus stabilizing function)
  std::vector<double> alpha;      // alpha_1..alpha_n
  std::vector<double> wdot;       // filter derivatives, w_2..w_{n+1}
  std::vector<double> xi_sq;      // |xi_i|^2 per stage
  std::vector<double> delta_dot;  // adaptive rates
  std::vector<double> theta_dot;
  double v = 0.0;                 // input-filter command
};

// --- elementary pieces -----------------------------------------------------

// k_b^2 - z^2, throwing BarrierViolation (1-based index attached) once the
// margin is inside the guard band.
double checked_margin(double z, double k_b, int index);

// tanh(p/upsilon); the smooth surrogate for sign(p) in the robust terms.
double robust_tanh_term(double p, double upsilon);

// Stabilizing functions.  xi_sq is |xi|^2 of the stage's fuzzy basis.
double virtual_control_first(double z1, double k_b1, double K1, double theta_hat, double xi_sq,
                             double delta_hat, double upsilon);
double virtual_control_mid(double z_i, double z_prev, double k_bi, double k_b_prev, double K_i,
                           double theta_hat, double xi_sq, double delta_hat, double upsilon,
                           int index);
double virtual_control_last(double z_n, double z_prev, double k_bn, double k_b_prev, double K_n,
                            double theta_hat, double xi_sq, double delta_hat, double upsilon,
                            int index);

// Input-filter command for the delay-surrogate coordinate.
double control_v(double z_last, double K_last, double lambda, double chi, double kappa, double u,
                 double e_last, double tau_last);

// Adaptive rates for one stage.
double delta_hat_rate(double z, double k_b, double gamma, double sigma, double upsilon,
                      double delta_hat, int index);
double theta_hat_rate(double z, double k_b, double beta, double sigma, double xi_sq,
                      double theta_hat, int index);

// First-order pieces of the closed loop.
double dsc_filter_deriv(double w, double alpha_prev, double tau);  // (alpha - w)/tau
double pade_state_deriv(double chi, double u, double lambda);      // -lambda chi + 2 lambda u
double input_filter_deriv(double u, double v, double kappa);       // -kappa u + v

// --- full cascade ----------------------------------------------------------

// Gains + per-stage bases; evaluation is pure (safe to call concurrently).
// Stage 1 reads (x1, y_d'); stage i >= 2 reads (x_1..x_i, w_i') with the
// filter derivative taken from the filter equation, never from differencing.
class BacksteppingController {
public:
  BacksteppingController(int n, ControllerGains gains, std::vector<FuzzyBasis> bases);

  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const ControllerGains& gains() const { return gains_; }
  [[nodiscard]] const std::vector<FuzzyBasis>& bases() const { return bases_; }

  // One controller pass.  w = (w_2..w_{n+1}).  Throws BarrierViolation when
  // some |z_i| is at its barrier.
  void evaluate_into(std::span<const double> x, double chi, double u, std::span<const double> w,
                     const AdaptiveState& a, double y_d, double y_d_dot, ControlOutput& out) const;
  [[nodiscard]] ControlOutput evaluate(std::span<const double> x, double chi, double u,
                                       std::span<const double> w, const AdaptiveState& a,
                                       double y_d, double y_d_dot) const;

  // Surface-filter initialization w_{i+1}(0) = alpha_i(0), evaluated
  // sequentially at the initial state (so every filter starts with zero
  // derivative).  Returns (w_2(0)..w_{n+1}(0)).
  [[nodiscard]] std::vector<double> initial_filter_states(std::span<const double> x0,
                                                          const AdaptiveState& a0, double y_d0,
                                                          double y_d_dot0) const;

  // Inverse of the initialization: the x(0) that realizes prescribed
  // tracking offsets z_1(0)..z_n(0) under w_{i+1}(0) = alpha_i(0).  Used to
  // place barrier-consistent initial-state samples.
  [[nodiscard]] std::vector<double> states_for_initial_offsets(std::span<const double> z0,
                                                               const AdaptiveState& a0,
                                                               double y_d0,
                                                               double y_d_dot0) const;

private:
  int n_;
  ControllerGains gains_;
  std::vector<FuzzyBasis> bases_;
};

}  // namespace backstep
