#pragma once

#include <functional>
#include <string>

namespace backstep {

// Tracking reference y_d with its first two derivatives and the bounds the
// feasibility conditions need.  Derivatives are exact (symbolic), never
// finite-differenced.
struct ReferenceSignal {
  std::function<double(double)> y;
  std::function<double(double)> dy;
  std::function<double(double)> ddy;

  double horizon = 0.0;  // window the bounds below were taken over
  double A0 = 0.0;       // sup_t |y_d(t)|
  double dy_sup = 0.0;   // sup_t |y_d'(t)|
  double C0 = 0.0;       // sup_t (y_d^2 + y_d'^2 + y_d''^2)

  // Parses an expression in t (e.g. "1.5*sin(t)+cos(t)"), differentiates it
  // twice, and computes the bounds over [0, horizon].
  static ReferenceSignal from_expression(const std::string& text, double horizon);

  static ReferenceSignal from_functions(std::function<double(double)> y,
                                        std::function<double(double)> dy,
                                        std::function<double(double)> ddy, double horizon);
};

// sup_{[t0,t1]} |f|, dense scan plus local ternary refinement.  Accurate to
// ~1e-12 relative for smooth f; used for A0 and the disturbance-bound checks.
double sup_abs_scan(const std::function<double(double)>& f, double t0, double t1,
                    int coarse_samples = 20000);

}  // namespace backstep
