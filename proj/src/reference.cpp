#include "backstep/reference.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "backstep/errors.hpp"
#include "backstep/expr.hpp"

namespace backstep {

double sup_abs_scan(const std::function<double(double)>& f, double t0, double t1,
                    int coarse_samples) {
  if (!(t1 > t0)) throw ConfigError("sup scan needs a non-empty interval");
  const double dt = (t1 - t0) / coarse_samples;
  double best = 0.0, t_best = t0;
  for (int k = 0; k <= coarse_samples; ++k) {
    const double t = t0 + k * dt;
    const double v = std::fabs(f(t));
    if (v > best) {
      best = v;
      t_best = t;
    }
  }
  // Ternary refinement around the coarse argmax; |f| is locally unimodal
  // there for any smooth f sampled this densely.
  double lo = std::max(t0, t_best - dt);
  double hi = std::min(t1, t_best + dt);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (std::fabs(f(m1)) < std::fabs(f(m2)))
      lo = m1;
    else
      hi = m2;
  }
  const double refined = std::fabs(f(0.5 * (lo + hi)));
  return std::max(best, refined);
}

ReferenceSignal ReferenceSignal::from_functions(std::function<double(double)> y,
                                                std::function<double(double)> dy,
                                                std::function<double(double)> ddy,
                                                double horizon) {
  ReferenceSignal r;
  r.y = std::move(y);
  r.dy = std::move(dy);
  r.ddy = std::move(ddy);
  r.horizon = horizon;
  r.A0 = sup_abs_scan(r.y, 0.0, horizon);
  r.dy_sup = sup_abs_scan(r.dy, 0.0, horizon);
  const auto& fy = r.y;
  const auto& fdy = r.dy;
  const auto& fddy = r.ddy;
  auto norm2 = [&fy, &fdy, &fddy](double t) {
    const double a = fy(t), b = fdy(t), c = fddy(t);
    return a * a + b * b + c * c;
  };
  const double s = sup_abs_scan(norm2, 0.0, horizon);
  r.C0 = s;
  return r;
}

ReferenceSignal ReferenceSignal::from_expression(const std::string& text, double horizon) {
  const std::vector<std::string> vars = {"t"};
  auto e0 = std::make_shared<Expr>(Expr::parse(text, vars));
  auto e1 = std::make_shared<Expr>(e0->derivative(0));
  auto e2 = std::make_shared<Expr>(e1->derivative(0));
  auto wrap = [](std::shared_ptr<Expr> e) {
    return [e = std::move(e)](double t) { return e->eval(std::span<const double>(&t, 1)); };
  };
  return from_functions(wrap(std::move(e0)), wrap(std::move(e1)), wrap(std::move(e2)), horizon);
}

}  // namespace backstep
