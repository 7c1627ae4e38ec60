#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "backstep/errors.hpp"
#include "backstep/fls.hpp"

using namespace backstep;

namespace {

// Two rules on one dimension, centers 0 and 1, unit width.
FuzzyBasis two_rule_basis() {
  FuzzyBasis b;
  b.dim = 1;
  b.centers = {{0.0}, {1.0}};
  b.denom = {1.0, 1.0};
  b.validate();
  return b;
}

std::vector<double> eval_basis(const FuzzyBasis& b, std::vector<double> z) {
  std::vector<double> xi(static_cast<std::size_t>(b.rule_count()));
  basis(b, z, xi);
  return xi;
}

}  // namespace

TEST_CASE("two-rule basis at the first center") {
  FuzzyBasis b = two_rule_basis();
  std::vector<double> xi = eval_basis(b, {0.0});
  // Unnormalized activations are 1 and e^{-1}.
  const double e1 = std::exp(-1.0);
  CHECK(xi[0] == doctest::Approx(1.0 / (1.0 + e1)).epsilon(1e-15));
  CHECK(xi[1] == doctest::Approx(e1 / (1.0 + e1)).epsilon(1e-15));

  const double want = (1.0 + std::exp(-2.0)) / ((1.0 + e1) * (1.0 + e1));
  CHECK(regressor_norm(b, std::vector<double>{0.0}) == doctest::Approx(want).epsilon(1e-14));
  CHECK(regressor_norm(b, std::vector<double>{0.0}) == doctest::Approx(0.6067761).epsilon(1e-6));
}

TEST_CASE("basis is a partition of unity with bounded norm") {
  FuzzyBasis b = make_grid_basis({{-2.0, 2.0}, {-5.0, 5.0}}, {5, 5});
  REQUIRE(b.rule_count() == 25);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u1(-2.0, 2.0), u2(-5.0, 5.0);
  for (int k = 0; k < 2000; ++k) {
    std::vector<double> z = {u1(rng), u2(rng)};
    std::vector<double> xi = eval_basis(b, z);
    double sum = 0.0, sq = 0.0;
    for (double v : xi) {
      CHECK(v >= 0.0);
      sum += v;
      sq += v * v;
    }
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    const double nrm = regressor_norm(b, z);
    CHECK(nrm == doctest::Approx(sq).epsilon(1e-12));
    CHECK(nrm >= 1.0 / 25 - 1e-15);
    CHECK(nrm <= 1.0 + 1e-15);
  }
}

TEST_CASE("basis is invariant under joint translation of centers and input") {
  FuzzyBasis b = two_rule_basis();
  FuzzyBasis shifted = b;
  const double c = 3.25;
  for (auto& center : shifted.centers) center[0] += c;
  for (double z : {-0.7, 0.0, 0.4, 1.9}) {
    std::vector<double> a = eval_basis(b, {z});
    std::vector<double> s = eval_basis(shifted, {z + c});
    CHECK(a[0] == doctest::Approx(s[0]).epsilon(1e-15));
    CHECK(a[1] == doctest::Approx(s[1]).epsilon(1e-15));
  }
}

TEST_CASE("far outside the grid the basis degenerates to one-hot") {
  FuzzyBasis b = make_grid_basis({{-1.0, 1.0}}, {3});
  std::vector<double> xi = eval_basis(b, {1e6});
  double sum = 0.0;
  int nonzero = 0;
  for (double v : xi) {
    sum += v;
    if (v != 0.0) ++nonzero;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(nonzero == 1);
  CHECK(xi[2] == 1.0);  // nearest center is the rightmost one
  CHECK(regressor_norm(b, std::vector<double>{1e6}) == 1.0);
}

TEST_CASE("grid basis enumerates a full lattice") {
  FuzzyBasis b = make_grid_basis({{-1.0, 1.0}, {0.0, 4.0}, {-2.0, 2.0}}, {3, 5, 2});
  CHECK(b.dim == 3);
  REQUIRE(b.rule_count() == 3 * 5 * 2);
  // First lattice point is every lower corner; last is every upper corner.
  CHECK(b.centers.front()[0] == doctest::Approx(-1.0));
  CHECK(b.centers.front()[1] == doctest::Approx(0.0));
  CHECK(b.centers.front()[2] == doctest::Approx(-2.0));
  CHECK(b.centers.back()[0] == doctest::Approx(1.0));
  CHECK(b.centers.back()[1] == doctest::Approx(4.0));
  CHECK(b.centers.back()[2] == doctest::Approx(2.0));
}

TEST_CASE("grid basis rejects degenerate requests") {
  CHECK_THROWS_AS(make_grid_basis({{-1.0, 1.0}}, {1}), ConfigError);
  CHECK_THROWS_AS(make_grid_basis({{1.0, -1.0}}, {3}), ConfigError);
  CHECK_THROWS_AS(make_grid_basis({{-1.0, 1.0}, {0.0, 1.0}}, {3}), ConfigError);
}
