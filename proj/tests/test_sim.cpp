#include <doctest.h>

#include <cmath>
#include <vector>

#include "backstep/errors.hpp"
#include "backstep/sim.hpp"

using namespace backstep;

namespace {

SimConfig short_benchmark(double T = 0.5, double h = 1e-3) {
  SimConfig cfg;
  cfg.plant = example_plant();
  cfg.ref = ReferenceSignal::from_expression("1.5*sin(t) + cos(t)", T);
  cfg.gains.K = {4.9, 10.2, 20.0};
  cfg.gains.k_b = {2.0, 5.0};
  cfg.gains.sigma = {10.0, 8.0};
  cfg.gains.gamma = {10.0, 10.0};
  cfg.gains.beta = {10.0, 10.0};
  cfg.gains.upsilon = {0.1, 0.1};
  cfg.gains.filter_tau = {0.002, 0.002};
  cfg.gains.kappa = 0.0001;
  cfg.gains.lambda = 100.0;
  cfg.bases = {make_grid_basis({{-3.8, 3.8}, {-2.0, 2.0}}, {5, 5}),
               make_grid_basis({{-3.8, 3.8}, {-6.0, 6.0}, {-10.0, 10.0}}, {5, 5, 5})};
  cfg.tau = 0.01;
  cfg.h = h;
  cfg.T = T;
  cfg.x0 = {0.5, 0.0};
  cfg.adapt0 = {{0.01, 0.01}, {0.01, 0.01}};
  cfg.u0 = 0.0;
  return cfg;
}

}  // namespace

TEST_CASE("one Runge-Kutta step of x' = -x reproduces the quartic Taylor value") {
  auto f = [](double, std::span<const double> s, std::span<double> ds) { ds[0] = -s[0]; };
  std::vector<double> next = rk4_step(f, 0.0, std::vector<double>{1.0}, 0.1);
  const double want = 1.0 - 0.1 + 0.01 / 2.0 - 0.001 / 6.0 + 0.0001 / 24.0;
  CHECK(next[0] == doctest::Approx(want).epsilon(1e-15));
  CHECK(next[0] == doctest::Approx(0.9048375).epsilon(1e-7));
}

TEST_CASE("integrator shows fourth-order global convergence") {
  auto f = [](double, std::span<const double> s, std::span<double> ds) { ds[0] = -s[0]; };
  auto run = [&](double h) {
    std::vector<double> s{1.0};
    const int steps = static_cast<int>(std::llround(1.0 / h));
    for (int k = 0; k < steps; ++k) s = rk4_step(f, k * h, s, h);
    return std::fabs(s[0] - std::exp(-1.0));
  };
  const double e1 = run(1e-2), e2 = run(5e-3);
  CHECK(e1 / e2 >= 12.0);  // 2^4 = 16 up to higher-order residue
}

TEST_CASE("boundedness surrogate at a pinned sample") {
  const std::vector<double> z = {1.0, 0.0, 0.0}, e = {0.0, 0.0}, k_b = {2.0, 5.0};
  CHECK(lyapunov_surrogate_sample(z, e, k_b) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
  CHECK(lyapunov_surrogate_sample(z, e, k_b) == doctest::Approx(0.2876821).epsilon(1e-6));
  // An extra filter mismatch and surrogate offset add quadratically.
  const std::vector<double> z2 = {1.0, 0.0, 2.0}, e2 = {0.5, 0.0};
  CHECK(lyapunov_surrogate_sample(z2, e2, k_b) ==
        doctest::Approx(std::log(4.0 / 3.0) + 4.0 + 0.25).epsilon(1e-14));
}

TEST_CASE("closed-loop run records the exact grid and delayed input") {
  Trajectory traj = simulate(short_benchmark());
  REQUIRE(traj.samples() == 501);
  CHECK(traj.t.front() == 0.0);
  CHECK(traj.t.back() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(traj.n == 2);

  // u_delayed is u shifted by exactly m = tau/h = 10 samples, fill u0 before.
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    if (k < 10)
      CHECK(traj.u_delayed[k] == 0.0);
    else
      CHECK(traj.u_delayed[k] == traj.u[k - 10]);
  }

  // Initialization: z1(0) = x1(0) - y_d(0), filters start on their targets,
  // surrogate starts at its rest point 2 u0.
  CHECK(traj.z[0][0] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(traj.e[0][0] == 0.0);
  CHECK(traj.e[1][0] == 0.0);
  CHECK(traj.w[0][0] == traj.alpha[0][0]);
  CHECK(traj.w[1][0] == traj.alpha[1][0]);
  CHECK(traj.chi[0] == 0.0);
  CHECK(traj.u[0] == 0.0);

  // Recorded surrogate equals its recomputation, and the estimates stay positive.
  std::vector<double> vs = lyapunov_surrogate(traj);
  for (std::size_t k = 0; k < traj.samples(); ++k) {
    CHECK(traj.Vs[k] == vs[k]);
    CHECK(std::isfinite(traj.Vs[k]));
    CHECK(traj.delta_hat[0][k] > 0.0);
    CHECK(traj.delta_hat[1][k] > 0.0);
    CHECK(traj.theta_hat[0][k] > 0.0);
    CHECK(traj.theta_hat[1][k] > 0.0);
    CHECK(traj.margin[0][k] > 0.0);
    CHECK(traj.margin[1][k] > 0.0);
  }
}

TEST_CASE("closed-loop run is bitwise deterministic") {
  Trajectory a = simulate(short_benchmark());
  Trajectory b = simulate(short_benchmark());
  REQUIRE(a.samples() == b.samples());
  for (std::size_t k = 0; k < a.samples(); ++k) {
    CHECK(a.x[0][k] == b.x[0][k]);
    CHECK(a.x[1][k] == b.x[1][k]);
    CHECK(a.u[k] == b.u[k]);
    CHECK(a.v[k] == b.v[k]);
    CHECK(a.Vs[k] == b.Vs[k]);
  }
}

TEST_CASE("explicit surrogate initialization overrides the rest point") {
  SimConfig cfg = short_benchmark(0.05);
  cfg.chi0 = 0.7;
  cfg.chi0_is_default = false;
  Trajectory traj = simulate(cfg);
  CHECK(traj.chi[0] == 0.7);
}

TEST_CASE("configuration problems are rejected before stepping") {
  SimConfig cfg = short_benchmark();
  cfg.tau = 0.0105;  // not on the step grid
  CHECK_THROWS_AS(simulate(cfg), ConfigError);

  cfg = short_benchmark();
  cfg.x0 = {3.9, 0.0};  // outside the state constraint box
  CHECK_THROWS_AS(simulate(cfg), ConfigError);

  cfg = short_benchmark();
  cfg.adapt0.delta_hat[0] = 0.0;  // estimates must start positive
  CHECK_THROWS_AS(simulate(cfg), ConfigError);

  // An initial tracking offset beyond the barrier is a configuration error,
  // not a runtime barrier event.
  cfg = short_benchmark();
  cfg.ref = ReferenceSignal::from_expression("3", cfg.T);
  CHECK_THROWS_AS(simulate(cfg), ConfigError);
}

TEST_CASE("a runtime barrier crossing throws with the failure time attached") {
  SimConfig cfg = short_benchmark(2.0);
  // Gains too weak to track a +-3 swing inside a +-2 barrier; the sluggish
  // filters keep the inner loop from rescuing the error by brute force.
  cfg.ref = ReferenceSignal::from_expression("3*sin(t)", 2.0);
  cfg.gains.K = {0.1, 0.1, 0.1};
  cfg.gains.lambda = 200.0;
  cfg.gains.filter_tau = {0.01, 0.01};
  cfg.x0 = {0.0, 0.0};
  try {
    simulate(cfg);
    FAIL("expected a barrier violation");
  } catch (const BarrierViolation& b) {
    CHECK(b.index >= 1);
    CHECK(b.index <= 2);
    CHECK(b.t > 0.05);
    CHECK(b.t < 2.0);
  }
}

TEST_CASE("unbounded growth throws a divergence error, not a hang") {
  SimConfig cfg = short_benchmark(0.5, 1e-3);
  // A slow last filter feeds -e3/tau3 back with too much lag for the actuation
  // delay: the surrogate pair rings up through the plant until it overflows.
  cfg.gains.filter_tau = {0.01, 0.01};
  try {
    simulate(cfg);
    FAIL("expected divergence");
  } catch (const SimulationDiverged& d) {
    CHECK(d.t > 0.0);
    CHECK(d.t <= 0.5 + 1e-12);
  }
}

TEST_CASE("constraint audit mirrors the recorded extrema") {
  Trajectory traj = simulate(short_benchmark());
  ConstraintReport rep = check_constraints(traj, 1.8027756377319946);
  REQUIRE(rep.entries.size() == 6);
  CHECK(rep.entries[0].name == "sup|x1| < k_c1");
  CHECK(rep.entries[1].name == "sup|x2| < k_c2");
  CHECK(rep.entries[2].name == "sup|z1| < k_b1");
  CHECK(rep.entries[3].name == "sup|z2| < k_b2");
  CHECK(rep.entries[4].name == "sup|x1| <= k_b1 + rho1");
  CHECK(rep.entries[5].name == "sup|x2| <= k_b2 + rho2");
  CHECK(rep.rho[0] == doctest::Approx(1.8027756377319946));
  // rho2 is the filter-signal sup, recomputable from the trajectory.
  double ws = 0.0;
  for (double w : traj.w[0]) ws = std::max(ws, std::fabs(w));
  CHECK(rep.rho[1] == doctest::Approx(ws));
  // The short benchmark run stays inside both boxes.
  CHECK(rep.entries[0].pass);
  CHECK(rep.entries[2].pass);
  CHECK(rep.entries[3].pass);
  for (int i = 0; i < 2; ++i) {
    CHECK(rep.x_sup[i] < traj.k_c[i]);
    CHECK(rep.z_sup[i] < traj.k_b[i]);
    CHECK(rep.margin_min[i] > 0.0);
  }
}
