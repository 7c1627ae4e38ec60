#include "backstep/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "backstep/errors.hpp"

namespace backstep {

namespace {

std::string indexed(const char* fmt, int i) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, i, i);
  return buf;
}

// sigma layout: K_1..K_{n-1} then k_b2..k_bn.
void apply_candidate(SimConfig& cfg, std::span<const double> sigma) {
  const int n = cfg.plant.n;
  for (int j = 0; j < n - 1; ++j) cfg.gains.K[j] = sigma[j];
  for (int j = 0; j < n - 1; ++j) cfg.gains.k_b[j + 1] = sigma[n - 1 + j];
}

std::vector<std::vector<double>> default_init_samples(const SimConfig& cfg, double fraction) {
  const int n = cfg.plant.n;
  const BacksteppingController ctrl(n, cfg.gains, cfg.bases);
  const double y0 = cfg.ref.y(0.0), dy0 = cfg.ref.dy(0.0);

  std::vector<std::vector<double>> samples;
  samples.push_back(cfg.x0);  // the scenario's own initial state

  std::vector<double> z0(n, 0.0);
  samples.push_back(ctrl.states_for_initial_offsets(z0, cfg.adapt0, y0, dy0));  // z-box center

  for (int corner = 0; corner < (1 << n); ++corner) {
    for (int i = 0; i < n; ++i)
      z0[i] = ((corner >> i) & 1 ? fraction : -fraction) * cfg.gains.k_b[i];
    samples.push_back(ctrl.states_for_initial_offsets(z0, cfg.adapt0, y0, dy0));
  }
  return samples;
}

struct Violation {
  std::string name;
  double amount = 0.0;
};

// Evaluates one candidate end to end; never throws (failures become
// infeasibility records so the search can keep scanning the grid).
CandidateResult evaluate_candidate(const FeasibilityProblem& problem,
                                   std::vector<double> sigma) {
  CandidateResult res;
  res.sigma = std::move(sigma);
  for (double s : res.sigma) res.N += s;

  SimConfig cfg = problem.base;
  apply_candidate(cfg, res.sigma);
  const int n = cfg.plant.n;

  // Pre-simulation check first (before full validation, which would fold an
  // initial barrier violation into a generic configuration failure): every
  // sampled initial state must start inside the candidate's barriers,
  // k_bi > |x_i(0) - alpha_{i-1}(0)|.
  std::vector<std::vector<double>> samples;
  try {
    const BacksteppingController ctrl(n, cfg.gains, cfg.bases);
    const double y0 = cfg.ref.y(0.0), dy0 = cfg.ref.dy(0.0);
    samples = problem.init_samples.empty() ? default_init_samples(cfg, problem.init_fraction)
                                           : problem.init_samples;
    for (const auto& x0 : samples) {
      try {
        const std::vector<double> w0 = ctrl.initial_filter_states(x0, cfg.adapt0, y0, dy0);
        for (int i = 0; i < n; ++i) {
          const double zi = (i == 0) ? x0[0] - y0 : x0[i] - w0[i - 1];
          const double slack = cfg.gains.k_b[i] - std::fabs(zi);
          if (!(slack > 0.0)) {
            res.violated = indexed("k_b%d > |x%d(0) - alpha(0)| at an initial sample", i + 1);
            res.violation = -slack;
            return res;
          }
        }
      } catch (const BarrierViolation& b) {
        res.violated = indexed("k_b%d > |x%d(0) - alpha(0)| at an initial sample", b.index);
        res.violation = std::fabs(b.z) - b.k_b;
        return res;
      }
    }
  } catch (const std::exception& ex) {
    res.violated = std::string("configuration: ") + ex.what();
    res.violation = 1e30;
    return res;
  }

  try {
    cfg.validate();
  } catch (const std::exception& ex) {
    res.violated = std::string("configuration: ") + ex.what();
    res.violation = 1e30;
    return res;
  }

  std::vector<double> rho;
  try {
    rho = estimate_rho(cfg, samples);
  } catch (const std::exception& ex) {
    res.violated = std::string("sample run failed: ") + ex.what();
    res.violation = 1e30;
    return res;
  }
  res.rho = rho;

  // Among violated containment constraints, report the tightest one (the
  // closest to holding).
  Violation tight;
  bool violated = false;
  for (int i = 0; i < n; ++i) {
    const double slack = cfg.plant.k_c[i] - rho[i] - cfg.gains.k_b[i];
    if (slack > 0.0) continue;
    if (!violated || -slack < tight.amount) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "k_c%d > rho%d + k_b%d", i + 1, i + 1, i + 1);
      tight.name = buf;
      tight.amount = -slack;
      violated = true;
    }
  }
  if (violated) {
    res.violated = tight.name;
    res.violation = tight.amount;
    return res;
  }

  res.feasible = true;
  return res;
}

}  // namespace

std::vector<double> estimate_rho(const SimConfig& cfg,
                                 const std::vector<std::vector<double>>& init_samples) {
  const int n = cfg.plant.n;
  std::vector<double> rho(n, 0.0);
  rho[0] = cfg.ref.A0;
  for (const auto& x0 : init_samples) {
    SimConfig run = cfg;
    run.x0 = x0;
    const Trajectory traj = simulate(run);
    for (int i = 1; i < n; ++i) {
      double ws = 0.0;
      for (double wv : traj.w[i - 1]) ws = std::max(ws, std::fabs(wv));
      rho[i] = std::max(rho[i], ws);
    }
  }
  return rho;
}

FeasibilityResult feasibility_search(const FeasibilityProblem& problem) {
  const int n = problem.base.plant.n;
  if (static_cast<int>(problem.K_grid.size()) != n - 1 ||
      static_cast<int>(problem.kb_grid.size()) != n - 1)
    throw ConfigError("feasibility grids must list candidates for K_1..K_" + std::to_string(n - 1) +
                      " and k_b2..k_b" + std::to_string(n));
  for (const auto& g : problem.K_grid)
    if (g.empty()) throw ConfigError("empty K candidate list");
  for (const auto& g : problem.kb_grid)
    if (g.empty()) throw ConfigError("empty k_b candidate list");
  if (!(problem.init_fraction > 0.0) || !(problem.init_fraction < 1.0))
    throw ConfigError("init_fraction must lie in (0, 1)");

  // Cartesian product in deterministic (row-major) order.
  std::vector<const std::vector<double>*> axes;
  for (const auto& g : problem.K_grid) axes.push_back(&g);
  for (const auto& g : problem.kb_grid) axes.push_back(&g);
  std::size_t total = 1;
  for (const auto* a : axes) total *= a->size();

  std::vector<std::vector<double>> candidates;
  candidates.reserve(total);
  std::vector<std::size_t> idx(axes.size(), 0);
  for (;;) {
    std::vector<double> sigma(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) sigma[d] = (*axes[d])[idx[d]];
    candidates.push_back(std::move(sigma));
    int d = static_cast<int>(axes.size()) - 1;
    while (d >= 0 && ++idx[d] == axes[d]->size()) idx[d--] = 0;
    if (d < 0) break;
  }

  std::vector<CandidateResult> results(candidates.size());
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned threads =
      std::min<unsigned>(problem.threads > 0 ? problem.threads : hw,
                         static_cast<unsigned>(candidates.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i)
      results[i] = evaluate_candidate(problem, candidates[i]);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t]() {
        for (std::size_t i = t; i < candidates.size(); i += threads)
          results[i] = evaluate_candidate(problem, candidates[i]);
      });
    }
    for (auto& th : pool) th.join();
  }

  FeasibilityResult out;
  out.evaluated = std::move(results);

  const CandidateResult* best = nullptr;
  for (const auto& r : out.evaluated) {
    if (!r.feasible) continue;
    if (!best || r.N > best->N ||
        (r.N == best->N && std::lexicographical_compare(r.sigma.begin(), r.sigma.end(),
                                                        best->sigma.begin(), best->sigma.end())))
      best = &r;
  }
  if (!best) {
    const CandidateResult* tightest = nullptr;
    for (const auto& r : out.evaluated)
      if (!tightest || r.violation < tightest->violation) tightest = &r;
    throw EmptyFeasibleSet(tightest ? tightest->violated : "empty candidate grid");
  }
  out.best = *best;
  return out;
}

PrereqReport verify_prerequisites(const SimConfig& cfg) {
  const int n = cfg.plant.n;
  PrereqReport rep;
  rep.A0 = cfg.ref.A0;

  bool all = true;
  auto push = [&](std::string name, double value, double bound, bool ok) {
    all = all && ok;
    rep.entries.push_back(ConstraintEntry{std::move(name), value, bound, ok});
  };

  // Reference clearance inside the first constraint box.
  push("k_c1 > A0 + k_b1", rep.A0 + cfg.gains.k_b[0], cfg.plant.k_c[0],
       cfg.plant.k_c[0] > rep.A0 + cfg.gains.k_b[0]);

  for (int i = 0; i < n; ++i) {
    char name[48];
    std::snprintf(name, sizeof name, "|x%d(0)| < k_c%d", i + 1, i + 1);
    push(name, std::fabs(cfg.x0[i]), cfg.plant.k_c[i], std::fabs(cfg.x0[i]) < cfg.plant.k_c[i]);
  }

  // Initial barrier clearance through the surface-filter initialization.
  try {
    const BacksteppingController ctrl(n, cfg.gains, cfg.bases);
    const double y0 = cfg.ref.y(0.0), dy0 = cfg.ref.dy(0.0);
    const std::vector<double> w0 = ctrl.initial_filter_states(cfg.x0, cfg.adapt0, y0, dy0);
    for (int i = 0; i < n; ++i) {
      const double zi = (i == 0) ? cfg.x0[0] - y0 : cfg.x0[i] - w0[i - 1];
      char name[48];
      std::snprintf(name, sizeof name, "|z%d(0)| < k_b%d", i + 1, i + 1);
      push(name, std::fabs(zi), cfg.gains.k_b[i], std::fabs(zi) < cfg.gains.k_b[i]);
    }
  } catch (const BarrierViolation& b) {
    char name[48];
    std::snprintf(name, sizeof name, "|z%d(0)| < k_b%d", b.index, b.index);
    push(name, std::fabs(b.z), b.k_b, false);
  }

  // Timing sanity: delay resolvable on the grid.
  bool delay_ok = true;
  double m_val = 0.0;
  try {
    m_val = DelayLine::steps_for(cfg.tau, cfg.h);
  } catch (const ConfigError&) {
    delay_ok = false;
  }
  push("tau = m h (exact)", m_val, cfg.tau / cfg.h, delay_ok);

  rep.pass = all;
  return rep;
}

}  // namespace backstep
