#include "backstep/plant.hpp"

#include <cmath>
#include <memory>

#include "backstep/errors.hpp"
#include "backstep/reference.hpp"

namespace backstep {

void PlantModel::validate() const {
  if (n < 1) throw ConfigError("plant needs at least one state");
  if (static_cast<int>(f.size()) != n) throw ConfigError("plant has wrong number of evaluators");
  for (int i = 0; i < n; ++i)
    if (!f[i]) throw ConfigError("plant evaluator f" + std::to_string(i + 1) + " is empty");
  if (static_cast<int>(k_c.size()) != n)
    throw ConfigError("constraint box k_c must have one entry per state");
  for (int i = 0; i < n; ++i)
    if (!(k_c[i] > 0.0))
      throw ConfigError("constraint half-width k_c" + std::to_string(i + 1) + " must be positive");
  if (!d.empty() && static_cast<int>(d.size()) != n)
    throw ConfigError("disturbance list must be empty or have one entry per state");
  if (!d.empty() && d_bound.size() != d.size())
    throw ConfigError("disturbance bounds must match the disturbance list");
}

void eval_dynamics_into(const PlantModel& model, std::span<const double> x, double u_eff, double t,
                        std::span<double> xdot) {
  for (int i = 0; i < model.n; ++i) {
    double v = model.f[i](x, u_eff);
    if (!model.d.empty() && model.d[i]) v += model.d[i](t);
    xdot[i] = v;
  }
}

std::vector<double> eval_dynamics(const PlantModel& model, std::span<const double> x, double u_eff,
                                  double t) {
  std::vector<double> xdot(model.n);
  eval_dynamics_into(model, x, u_eff, t, xdot);
  return xdot;
}

PlantModel example_plant() {
  PlantModel m;
  m.n = 2;
  m.f.resize(2);
  m.f[0] = [](std::span<const double> x, double) { return 0.2 * x[0] + 10.0 * x[1]; };
  m.f[1] = [](std::span<const double> x, double u) {
    const double x1 = x[0], x2 = x[1];
    return 0.6 * std::exp(-(x1 * x1 * x1 * x1) * (x2 * x2)) +
           (10.0 + 0.5 * std::exp(-x2 * x2)) * u + 0.4 * std::sin(u);
  };
  m.k_c = {3.8, 6.0};
  m.validate();
  return m;
}

PlantModel plant_from_expressions(int n, const std::vector<std::string>& f_texts,
                                  const std::vector<std::string>& d_texts,
                                  std::vector<double> k_c, std::vector<double> d_bound,
                                  double horizon) {
  if (static_cast<int>(f_texts.size()) != n)
    throw ConfigError("expected " + std::to_string(n) + " state equations");

  PlantModel m;
  m.n = n;
  m.k_c = std::move(k_c);
  m.f.resize(n);

  // Row i (0-based) may mention x1..x_{i+2}, capped at n; only the last row
  // may mention u.
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> vars;
    const int visible = std::min(i + 2, n);
    for (int j = 1; j <= visible; ++j) vars.push_back("x" + std::to_string(j));
    const std::size_t u_index = vars.size();
    if (i == n - 1) vars.push_back("u");
    const std::size_t t_index = vars.size();
    vars.push_back("t");

    auto e = std::make_shared<Expr>(Expr::parse(f_texts[i], vars));
    if (e->uses(t_index))
      throw ConfigError("state equation f" + std::to_string(i + 1) +
                        ": explicit time dependence belongs in the disturbance terms");
    const bool last = (i == n - 1);
    m.f[i] = [e, visible, last, u_index](std::span<const double> x, double u) {
      double vals[16];
      for (int j = 0; j < visible; ++j) vals[j] = x[j];
      std::size_t len = static_cast<std::size_t>(visible);
      if (last) vals[u_index] = u, ++len;
      vals[len++] = 0.0;  // t slot, unused by construction
      return e->eval(std::span<const double>(vals, len));
    };
  }

  if (!d_texts.empty()) attach_disturbances(m, d_texts, d_bound, horizon);

  m.validate();
  return m;
}

void attach_disturbances(PlantModel& m, const std::vector<std::string>& d_texts,
                         const std::vector<double>& d_bound, double horizon) {
  const int n = m.n;
  if (static_cast<int>(d_texts.size()) != n)
    throw ConfigError("disturbance list must have one entry per state");
  m.d.assign(n, nullptr);
  m.d_bound.assign(n, 0.0);
  const std::vector<std::string> tvar = {"t"};
  for (int i = 0; i < n; ++i) {
    if (d_texts[i].empty()) continue;
    auto e = std::make_shared<Expr>(Expr::parse(d_texts[i], tvar));
    m.d[i] = [e](double t) { return e->eval(std::span<const double>(&t, 1)); };
    const double sampled = sup_abs_scan(m.d[i], 0.0, horizon);
    const bool given = i < static_cast<int>(d_bound.size()) && d_bound[i] > 0.0;
    m.d_bound[i] = given ? d_bound[i] : sampled;
    if (sampled > m.d_bound[i] * (1.0 + 1e-12))
      throw ConfigError("disturbance d" + std::to_string(i + 1) +
                        " exceeds its declared bound on the horizon");
  }
  m.validate();
}

DelayLine::DelayLine(int depth, double fill)
    : depth_(depth), fill_(fill), buf_(static_cast<std::size_t>(depth) + 1, fill) {
  if (depth < 1) throw ConfigError("delay line depth must be >= 1");
}

void DelayLine::push(double v) {
  buf_[head_] = v;
  head_ = (head_ + 1) % buf_.size();
  ++count_;
}

double DelayLine::read() const {
  // head_ now points at the slot holding the value pushed depth_ steps before
  // the most recent push (it is the next to be overwritten).
  if (count_ <= static_cast<std::size_t>(depth_)) return fill_;
  return buf_[head_];
}

int DelayLine::steps_for(double tau, double h) {
  if (!(h > 0.0) || !(tau > 0.0)) throw ConfigError("delay and step must be positive");
  const auto m = static_cast<long long>(std::llround(tau / h));
  if (m < 1 || std::fabs(static_cast<double>(m) * h - tau) > 1e-9 * std::max(tau, h))
    throw ConfigError("input delay must be an exact multiple of the integration step");
  return static_cast<int>(m);
}

}  // namespace backstep
