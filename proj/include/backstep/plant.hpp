#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "backstep/expr.hpp"

namespace backstep {

// Pure-feedback plant
//
//   x_i'   = f_i(x_1..x_{i+1}) + d_i(t),   i < n
//   x_n'   = f_n(x_1..x_n, u_eff) + d_n(t)
//   y      = x_1
//
// where u_eff is the input *after* the actuation delay.  Evaluators receive
// the full state span plus u_eff; which entries an f_i may depend on is
// enforced where the model is constructed (expression-defined models reject
// out-of-scope symbols at parse time).
struct PlantModel {
  int n = 0;
  std::vector<std::function<double(std::span<const double>, double)>> f;
  std::vector<std::function<double(double)>> d;  // empty function => identically 0
  std::vector<double> d_bound;                   // sup_t |d_i|, same size as d
  std::vector<double> k_c;                       // state constraint box |x_i| < k_c[i]

  void validate() const;  // throws ConfigError
};

// x' at (x, u_eff, t); length n.
std::vector<double> eval_dynamics(const PlantModel& model, std::span<const double> x, double u_eff,
                                  double t);
// Allocation-free variant used by the integrator hot loop.
void eval_dynamics_into(const PlantModel& model, std::span<const double> x, double u_eff, double t,
                        std::span<double> xdot);

// Two-state benchmark plant:
//   x1' = 0.2 x1 + 10 x2
//   x2' = 0.6 exp(-x1^4 x2^2) + (10 + 0.5 exp(-x2^2)) u_eff + 0.4 sin(u_eff)
// with constraint box k_c = (3.8, 6) and no disturbance.
PlantModel example_plant();

// Model from scenario expression strings.  f_texts[i] may reference
// x1..x_{i+2} for i+1 < n (1-based: f_i sees x_1..x_{i+1}), and x1..xn plus u
// for the last row; d_texts entries are expressions in t (empty => 0).  When
// a disturbance bound is not supplied it is taken as the sampled sup of
// |d_i| over [0, horizon].
PlantModel plant_from_expressions(int n, const std::vector<std::string>& f_texts,
                                  const std::vector<std::string>& d_texts,
                                  std::vector<double> k_c, std::vector<double> d_bound,
                                  double horizon);

// Parses and attaches disturbance expressions in t to an existing model.
// Bound entries <= 0 (or a short list) fall back to the sampled sup of
// |d_i| over [0, horizon]; a supplied bound the signal exceeds is rejected.
void attach_disturbances(PlantModel& m, const std::vector<std::string>& d_texts,
                         const std::vector<double>& d_bound, double horizon);

// Fixed-depth sample delay: after k pushes, read() is the (k-m)-th pushed
// value (1-based) once k > m, and fill before that.  Models an exact
// transport delay tau = m*h on a uniform grid -- no interpolation.
class DelayLine {
public:
  DelayLine(int depth, double fill);

  void push(double v);
  [[nodiscard]] double read() const;

  [[nodiscard]] int depth() const { return depth_; }

  // tau/h as an exact integer; throws ConfigError when tau is not a
  // (floating-point-exact) multiple of h or the quotient is < 1.
  static int steps_for(double tau, double h);

private:
  int depth_;
  double fill_;
  std::vector<double> buf_;  // depth_+1 slots; head_ is the next write position
  std::size_t head_ = 0;
  std::size_t count_ = 0;
};

}  // namespace backstep
