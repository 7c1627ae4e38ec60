#include <doctest.h>

#include <cmath>
#include <vector>

#include "backstep/errors.hpp"
#include "backstep/expr.hpp"

using backstep::ConfigError;
using backstep::Expr;

namespace {

double ev(const Expr& e, std::vector<double> vals) { return e.eval(vals); }

}  // namespace

TEST_CASE("expression parsing and evaluation") {
  Expr e = Expr::parse("0.2*x1 + 10*x2", {"x1", "x2"});
  CHECK(ev(e, {1.0, 0.0}) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(ev(e, {0.0, 1.0}) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(ev(e, {0.5, -0.25}) == doctest::Approx(0.1 - 2.5).epsilon(1e-14));
}

TEST_CASE("expression precedence and unary minus") {
  Expr e = Expr::parse("-x^2 + 2*x*3 - 4/2", {"x"});
  // -(x^2), not (-x)^2
  CHECK(ev(e, {3.0}) == doctest::Approx(-9.0 + 18.0 - 2.0).epsilon(1e-15));
  Expr f = Expr::parse("2^3", {});
  CHECK(ev(f, {}) == doctest::Approx(8.0).epsilon(1e-15));
}

TEST_CASE("expression functions match the standard library") {
  Expr e = Expr::parse("sin(t) + cos(2*t) + exp(-t) + tanh(t) + sqrt(t+1)", {"t"});
  const double t = 0.7;
  const double want =
      std::sin(t) + std::cos(2 * t) + std::exp(-t) + std::tanh(t) + std::sqrt(t + 1);
  CHECK(ev(e, {t}) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("expression round-trips through to_string") {
  Expr e = Expr::parse("0.6*exp(-x1^4*x2^2)", {"x1", "x2"});
  Expr f = Expr::parse(e.to_string(), {"x1", "x2"});
  for (double a : {-1.1, -0.3, 0.0, 0.4, 0.9}) {
    for (double b : {-0.8, 0.2, 1.3}) {
      CHECK(ev(f, {a, b}) == doctest::Approx(ev(e, {a, b})).epsilon(1e-14));
    }
  }
}

TEST_CASE("symbolic derivative of polynomial terms") {
  Expr e = Expr::parse("x^3 - 2*x", {"x"});
  Expr d = e.derivative(0);
  for (double x : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
    CHECK(ev(d, {x}) == doctest::Approx(3 * x * x - 2).epsilon(1e-13));
  }
}

TEST_CASE("symbolic derivative applies chain and product rules") {
  Expr e = Expr::parse("1.5*sin(t) + cos(t)", {"t"});
  Expr d1 = e.derivative(0);
  Expr d2 = d1.derivative(0);
  for (double t : {0.0, 0.3, 1.7, 4.0}) {
    CHECK(ev(d1, {t}) == doctest::Approx(1.5 * std::cos(t) - std::sin(t)).epsilon(1e-14));
    CHECK(ev(d2, {t}) == doctest::Approx(-1.5 * std::sin(t) - std::cos(t)).epsilon(1e-14));
  }
  // tanh' = 1 - tanh^2
  Expr g = Expr::parse("tanh(2*x)", {"x"});
  Expr gd = g.derivative(0);
  const double x = 0.4;
  const double th = std::tanh(2 * x);
  CHECK(ev(gd, {x}) == doctest::Approx(2 * (1 - th * th)).epsilon(1e-14));
}

TEST_CASE("derivative against central differences") {
  Expr e = Expr::parse("exp(-x1^4*x2^2)*sin(x1) + sqrt(x2+2)", {"x1", "x2"});
  Expr d0 = e.derivative(0);
  Expr d1 = e.derivative(1);
  const double h = 1e-5;
  for (double a : {-0.7, 0.2, 0.9}) {
    for (double b : {-0.4, 0.5, 1.1}) {
      const double fd0 = (ev(e, {a + h, b}) - ev(e, {a - h, b})) / (2 * h);
      const double fd1 = (ev(e, {a, b + h}) - ev(e, {a, b - h})) / (2 * h);
      CHECK(ev(d0, {a, b}) == doctest::Approx(fd0).epsilon(1e-7));
      CHECK(ev(d1, {a, b}) == doctest::Approx(fd1).epsilon(1e-7));
    }
  }
}

TEST_CASE("expression errors carry position and reason") {
  CHECK_THROWS_AS(Expr::parse("x1 + ", {"x1"}), ConfigError);
  CHECK_THROWS_AS(Expr::parse("foo(x1)", {"x1"}), ConfigError);
  CHECK_THROWS_AS(Expr::parse("x2", {"x1"}), ConfigError);
  CHECK_THROWS_AS(Expr::parse("(x1", {"x1"}), ConfigError);
  CHECK_THROWS_AS(Expr::parse("x1 ^ x1", {"x1"}), ConfigError);  // exponent must be constant
  CHECK_THROWS_AS(Expr::parse("", {"x1"}), ConfigError);
}

TEST_CASE("uses reports variable dependence") {
  Expr e = Expr::parse("x1*0 + x3", {"x1", "x2", "x3"});
  CHECK(e.uses(0));
  CHECK_FALSE(e.uses(1));
  CHECK(e.uses(2));
}
