#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace backstep {

// Scenario / configuration problems: bad keys, non-positive gains, delay not a
// multiple of the step, initial state outside its constraint box, ...
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A tracking coordinate reached its barrier (or the numerical guard band just
// inside it).  The controller's barrier quotients are meaningless past this
// point, so everything downstream treats it as a hard stop.
class BarrierViolation : public std::runtime_error {
public:
  BarrierViolation(int index, double z, double k_b,
                   double t = std::numeric_limits<double>::quiet_NaN());

  int index;    // 1-based coordinate index
  double z;     // offending coordinate value
  double k_b;   // its barrier half-width
  double t;     // simulation time; NaN when raised outside a simulation
};

// State left the finite/representable range without hitting a barrier first
// (typically the unconstrained filter states under destabilizing gains).
class SimulationDiverged : public std::runtime_error {
public:
  SimulationDiverged(const std::string& what_state, double t);

  std::string state_name;
  double t;
};

// Gain feasibility search exhausted its grid without a feasible candidate.
class EmptyFeasibleSet : public std::runtime_error {
public:
  explicit EmptyFeasibleSet(const std::string& tightest_constraint);

  // Description of the constraint that came closest to holding.
  std::string tightest_constraint;
};

}  // namespace backstep
