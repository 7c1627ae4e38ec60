#include "backstep/errors.hpp"

#include <cmath>
#include <cstdio>

namespace backstep {

namespace {

std::string barrier_message(int index, double z, double k_b, double t) {
  char buf[160];
  if (std::isnan(t)) {
    std::snprintf(buf, sizeof buf, "barrier violation: |z%d| = %.6g reached half-width %.6g",
                  index, std::fabs(z), k_b);
  } else {
    std::snprintf(buf, sizeof buf,
                  "barrier violation at t = %.6g: |z%d| = %.6g reached half-width %.6g", t, index,
                  std::fabs(z), k_b);
  }
  return buf;
}

std::string diverged_message(const std::string& state, double t) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "simulation diverged at t = %.6g (%s left the finite range)", t,
                state.c_str());
  return buf;
}

}  // namespace

BarrierViolation::BarrierViolation(int index, double z, double k_b, double t)
    : std::runtime_error(barrier_message(index, z, k_b, t)), index(index), z(z), k_b(k_b), t(t) {}

SimulationDiverged::SimulationDiverged(const std::string& what_state, double t)
    : std::runtime_error(diverged_message(what_state, t)), state_name(what_state), t(t) {}

EmptyFeasibleSet::EmptyFeasibleSet(const std::string& tightest)
    : std::runtime_error("no feasible gain candidate; tightest constraint: " + tightest),
      tightest_constraint(tightest) {}

}  // namespace backstep
