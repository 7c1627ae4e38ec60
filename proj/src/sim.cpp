#include "backstep/sim.hpp"

#include <cmath>
#include <cstdio>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

// Flat state layout: [x(n) | chi | u | w_2..w_{n+1} | delta_hat(n) | theta_hat(n)].
struct Layout {
  int n;
  [[nodiscard]] int chi() const { return n; }
  [[nodiscard]] int u() const { return n + 1; }
  [[nodiscard]] int w(int i) const { return n + 2 + i; }          // i = 0..n-1
  [[nodiscard]] int delta(int i) const { return 2 * n + 2 + i; }  // i = 0..n-1
  [[nodiscard]] int theta(int i) const { return 3 * n + 2 + i; }  // i = 0..n-1
  [[nodiscard]] int size() const { return 4 * n + 2; }
};

std::string flat_state_name(const Layout& L, int idx) {
  char buf[32];
  if (idx < L.n)
    std::snprintf(buf, sizeof buf, "x%d", idx + 1);
  else if (idx == L.chi())
    std::snprintf(buf, sizeof buf, "chi");
  else if (idx == L.u())
    std::snprintf(buf, sizeof buf, "u");
  else if (idx < L.delta(0))
    std::snprintf(buf, sizeof buf, "w%d", idx - L.w(0) + 2);
  else if (idx < L.theta(0))
    std::snprintf(buf, sizeof buf, "delta_hat%d", idx - L.delta(0) + 1);
  else
    std::snprintf(buf, sizeof buf, "theta_hat%d", idx - L.theta(0) + 1);
  return buf;
}

// Closed-loop right-hand side at (t, s) with the delayed input held fixed.
// The controller pass result is left in `out` (callers reuse the first
// stage's pass as the per-sample record).
void closed_loop_deriv(const PlantModel& plant, const BacksteppingController& ctrl,
                       const ReferenceSignal& ref, const Layout& L, double t,
                       std::span<const double> s, double u_delayed, AdaptiveState& adapt_scratch,
                       ControlOutput& out, std::span<double> ds) {
  const int n = L.n;
  adapt_scratch.delta_hat.assign(s.begin() + L.delta(0), s.begin() + L.delta(0) + n);
  adapt_scratch.theta_hat.assign(s.begin() + L.theta(0), s.begin() + L.theta(0) + n);

  ctrl.evaluate_into(s.first(n), s[L.chi()], s[L.u()], s.subspan(L.w(0), n), adapt_scratch,
                     ref.y(t), ref.dy(t), out);

  eval_dynamics_into(plant, s.first(n), u_delayed, t, ds.first(n));
  ds[L.chi()] = pade_state_deriv(s[L.chi()], s[L.u()], ctrl.gains().lambda);
  ds[L.u()] = input_filter_deriv(s[L.u()], out.v, ctrl.gains().kappa);
  for (int i = 0; i < n; ++i) {
    ds[L.w(i)] = out.wdot[i];
    ds[L.delta(i)] = out.delta_dot[i];
    ds[L.theta(i)] = out.theta_dot[i];
  }
}

}  // namespace

std::vector<double> rk4_step(
    const std::function<void(double, std::span<const double>, std::span<double>)>& f, double t,
    std::span<const double> state, double h) {
  const std::size_t m = state.size();
  std::vector<double> k1(m), k2(m), k3(m), k4(m), tmp(m), next(state.begin(), state.end());
  f(t, state, k1);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
  f(t + 0.5 * h, tmp, k2);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
  f(t + 0.5 * h, tmp, k3);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = state[i] + h * k3[i];
  f(t + h, tmp, k4);
  for (std::size_t i = 0; i < m; ++i)
    next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return next;
}

void SimConfig::validate() const {
  plant.validate();
  const int n = plant.n;
  gains.validate(n);
  if (!ref.y || !ref.dy || !ref.ddy) throw ConfigError("reference signal is incomplete");
  if (!(T > 0.0)) throw ConfigError("horizon T must be positive");
  if (!(h > 0.0)) throw ConfigError("step h must be positive");
  (void)DelayLine::steps_for(tau, h);
  if (static_cast<int>(x0.size()) != n) throw ConfigError("x0 must have one entry per state");
  for (int i = 0; i < n; ++i)
    if (!(std::fabs(x0[i]) < plant.k_c[i]))
      throw ConfigError("initial state x" + std::to_string(i + 1) +
                        " lies outside its constraint box");
  if (static_cast<int>(adapt0.delta_hat.size()) != n ||
      static_cast<int>(adapt0.theta_hat.size()) != n)
    throw ConfigError("adaptive initial values must have one entry per stage");
  for (int i = 0; i < n; ++i)
    if (!(adapt0.delta_hat[i] > 0.0) || !(adapt0.theta_hat[i] > 0.0))
      throw ConfigError("adaptive estimates must start positive");

  // The surface-filter initialization fixes every z_i(0); initial barrier
  // violations are configuration problems, not runtime events.
  BacksteppingController ctrl(n, gains, bases);
  try {
    (void)ctrl.initial_filter_states(x0, adapt0, ref.y(0.0), ref.dy(0.0));
  } catch (const BarrierViolation& b) {
    throw ConfigError(std::string("initial state violates a barrier: ") + b.what());
  }
}

Trajectory simulate(const SimConfig& cfg) {
  cfg.validate();
  const int n = cfg.plant.n;
  const Layout L{n};
  const BacksteppingController ctrl(n, cfg.gains, cfg.bases);
  const int m = DelayLine::steps_for(cfg.tau, cfg.h);
  const auto steps = static_cast<long long>(std::llround(cfg.T / cfg.h));
  if (steps < 1) throw ConfigError("horizon shorter than one step");

  std::vector<double> s(L.size());
  for (int i = 0; i < n; ++i) s[i] = cfg.x0[i];
  s[L.chi()] = cfg.chi_initial();
  s[L.u()] = cfg.u0;
  {
    const std::vector<double> w0 =
        ctrl.initial_filter_states(cfg.x0, cfg.adapt0, cfg.ref.y(0.0), cfg.ref.dy(0.0));
    for (int i = 0; i < n; ++i) s[L.w(i)] = w0[i];
  }
  for (int i = 0; i < n; ++i) s[L.delta(i)] = cfg.adapt0.delta_hat[i];
  for (int i = 0; i < n; ++i) s[L.theta(i)] = cfg.adapt0.theta_hat[i];

  DelayLine line(m, cfg.u0);

  Trajectory traj;
  traj.n = n;
  traj.h = cfg.h;
  traj.k_b = cfg.gains.k_b;
  traj.k_c = cfg.plant.k_c;
  const auto samples = static_cast<std::size_t>(steps) + 1;
  auto reserve_cols = [&](std::vector<std::vector<double>>& cols, int count) {
    cols.resize(count);
    for (auto& c : cols) c.reserve(samples);
  };
  traj.t.reserve(samples);
  reserve_cols(traj.x, n);
  reserve_cols(traj.z, n + 1);
  reserve_cols(traj.e, n);
  reserve_cols(traj.w, n);
  reserve_cols(traj.alpha, n);
  reserve_cols(traj.margin, n);
  reserve_cols(traj.delta_hat, n);
  reserve_cols(traj.theta_hat, n);
  traj.u.reserve(samples);
  traj.u_delayed.reserve(samples);
  traj.chi.reserve(samples);
  traj.v.reserve(samples);
  traj.Vs.reserve(samples);
  traj.y_d.reserve(samples);

  // RK4 workspace, reused across all steps.
  std::array<std::vector<double>, 5> ws;
  for (auto& b : ws) b.resize(L.size());
  AdaptiveState adapt_scratch;
  ControlOutput pass;       // stage-1 pass, doubles as the per-sample record
  ControlOutput pass_rest;  // stages 2..4

  for (long long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.h;
    line.push(s[L.u()]);
    const double ud = line.read();

    auto& [k1, k2, k3, k4, tmp] = ws;
    try {
      closed_loop_deriv(cfg.plant, ctrl, cfg.ref, L, t, s, ud, adapt_scratch, pass, k1);
    } catch (BarrierViolation& b) {
      b.t = t;
      throw;
    }

    traj.t.push_back(t);
    for (int i = 0; i < n; ++i) traj.x[i].push_back(s[i]);
    for (int i = 0; i <= n; ++i) traj.z[i].push_back(pass.z[i]);
    for (int i = 0; i < n; ++i) traj.e[i].push_back(pass.e[i]);
    for (int i = 0; i < n; ++i) traj.w[i].push_back(s[L.w(i)]);
    for (int i = 0; i < n; ++i) traj.alpha[i].push_back(pass.alpha[i]);
    for (int i = 0; i < n; ++i) traj.margin[i].push_back(pass.margin[i]);
    for (int i = 0; i < n; ++i) traj.delta_hat[i].push_back(s[L.delta(i)]);
    for (int i = 0; i < n; ++i) traj.theta_hat[i].push_back(s[L.theta(i)]);
    traj.u.push_back(s[L.u()]);
    traj.u_delayed.push_back(ud);
    traj.chi.push_back(s[L.chi()]);
    traj.v.push_back(pass.v);
    traj.Vs.push_back(lyapunov_surrogate_sample(pass.z, pass.e, cfg.gains.k_b));
    traj.y_d.push_back(cfg.ref.y(t));

    if (k == steps) break;

    try {
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * cfg.h * k1[i];
      closed_loop_deriv(cfg.plant, ctrl, cfg.ref, L, t + 0.5 * cfg.h, tmp, ud, adapt_scratch,
                        pass_rest, k2);
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + 0.5 * cfg.h * k2[i];
      closed_loop_deriv(cfg.plant, ctrl, cfg.ref, L, t + 0.5 * cfg.h, tmp, ud, adapt_scratch,
                        pass_rest, k3);
      for (std::size_t i = 0; i < s.size(); ++i) tmp[i] = s[i] + cfg.h * k3[i];
      closed_loop_deriv(cfg.plant, ctrl, cfg.ref, L, t + cfg.h, tmp, ud, adapt_scratch, pass_rest,
                        k4);
    } catch (BarrierViolation& b) {
      b.t = t;  // attribute mid-step stage failures to the step being taken
      throw;
    }
    for (std::size_t i = 0; i < s.size(); ++i)
      s[i] += cfg.h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double t_next = static_cast<double>(k + 1) * cfg.h;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i]) || std::fabs(s[i]) > 1e12)
        throw SimulationDiverged(flat_state_name(L, static_cast<int>(i)), t_next);
    }
    for (int i = 0; i < n; ++i) {
      if (!(s[L.delta(i)] > 0.0))
        throw SimulationDiverged("delta_hat" + std::to_string(i + 1) + " positivity", t_next);
      if (!(s[L.theta(i)] > 0.0))
        throw SimulationDiverged("theta_hat" + std::to_string(i + 1) + " positivity", t_next);
    }
  }

  return traj;
}

double lyapunov_surrogate_sample(std::span<const double> z, std::span<const double> e,
                                 std::span<const double> k_b) {
  const std::size_t n = k_b.size();
  double V = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double kb2 = k_b[i] * k_b[i];
    V += std::log(kb2 / (kb2 - z[i] * z[i]));
  }
  V += z[n] * z[n];
  for (std::size_t i = 0; i < n; ++i) V += e[i] * e[i];
  return V;
}

std::vector<double> lyapunov_surrogate(const Trajectory& traj) {
  const int n = traj.n;
  std::vector<double> out(traj.samples());
  std::vector<double> z(n + 1), e(n);
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    for (int i = 0; i <= n; ++i) z[i] = traj.z[i][k];
    for (int i = 0; i < n; ++i) e[i] = traj.e[i][k];
    out[k] = lyapunov_surrogate_sample(z, e, traj.k_b);
  }
  return out;
}

ConstraintReport check_constraints(const Trajectory& traj, double A0) {
  const int n = traj.n;
  ConstraintReport r;
  r.x_sup.assign(n, 0.0);
  r.z_sup.assign(n, 0.0);
  r.margin_min.assign(n, 0.0);
  r.rho.assign(n, 0.0);
  r.rho[0] = A0;

  for (int i = 0; i < n; ++i) {
    double xs = 0.0, zs = 0.0, ws = 0.0;
    for (std::size_t k = 0; k < traj.samples(); ++k) {
      xs = std::max(xs, std::fabs(traj.x[i][k]));
      zs = std::max(zs, std::fabs(traj.z[i][k]));
      if (i >= 1) ws = std::max(ws, std::fabs(traj.w[i - 1][k]));
    }
    r.x_sup[i] = xs;
    r.z_sup[i] = zs;
    r.margin_min[i] = traj.k_b[i] - zs;
    if (i >= 1) r.rho[i] = ws;
  }

  char name[64];
  bool all = true;
  auto push = [&](const std::string& nm, double value, double bound, bool strict_less) {
    ConstraintEntry c;
    c.name = nm;
    c.value = value;
    c.bound = bound;
    c.pass = strict_less ? (value < bound) : (value <= bound);
    all = all && c.pass;
    r.entries.push_back(std::move(c));
  };
  for (int i = 0; i < n; ++i) {
    std::snprintf(name, sizeof name, "sup|x%d| < k_c%d", i + 1, i + 1);
    push(name, r.x_sup[i], traj.k_c[i], true);
  }
  for (int i = 0; i < n; ++i) {
    std::snprintf(name, sizeof name, "sup|z%d| < k_b%d", i + 1, i + 1);
    push(name, r.z_sup[i], traj.k_b[i], true);
  }
  // Containment chain: |x_i| <= |z_i| + |w_i| stays under k_bi + rho_i.
  for (int i = 0; i < n; ++i) {
    std::snprintf(name, sizeof name, "sup|x%d| <= k_b%d + rho%d", i + 1, i + 1, i + 1);
    push(name, r.x_sup[i], traj.k_b[i] + r.rho[i], false);
  }
  r.pass = all;
  return r;
}

}  // namespace backstep
