#include "backstep/fls.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "backstep/errors.hpp"

namespace backstep {

void FuzzyBasis::validate() const {
  if (dim < 1) throw ConfigError("fuzzy basis needs at least one input dimension");
  if (centers.empty()) throw ConfigError("fuzzy basis needs at least one rule");
  if (denom.size() != centers.size())
    throw ConfigError("fuzzy basis width list must match the center list");
  for (std::size_t j = 0; j < centers.size(); ++j) {
    if (static_cast<int>(centers[j].size()) != dim)
      throw ConfigError("fuzzy center " + std::to_string(j) + " has the wrong dimension");
    if (!(denom[j] > 0.0)) throw ConfigError("fuzzy widths must be positive");
  }
}

namespace {

// One pass over the rules: S1 = sum zeta, S2 = sum zeta^2, plus the index of
// the nearest center for the all-underflow fallback.
struct Sums {
  double s1 = 0.0;
  double s2 = 0.0;
  std::size_t nearest = 0;
};

Sums activation_sums(const FuzzyBasis& b, std::span<const double> Z) {
  Sums s;
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = b.centers.size();
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = b.centers[j];
    double q = 0.0;
    for (int d = 0; d < b.dim; ++d) {
      const double r = Z[d] - c[d];
      q += r * r;
    }
    if (q < best) {
      best = q;
      s.nearest = j;
    }
    const double zeta = std::exp(-q / b.denom[j]);
    s.s1 += zeta;
    s.s2 += zeta * zeta;
  }
  return s;
}

}  // namespace

void basis(const FuzzyBasis& b, std::span<const double> Z, std::span<double> xi_out) {
  const std::size_t n = b.centers.size();
  double s1 = 0.0;
  std::size_t nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const auto& c = b.centers[j];
    double q = 0.0;
    for (int d = 0; d < b.dim; ++d) {
      const double r = Z[d] - c[d];
      q += r * r;
    }
    if (q < best) {
      best = q;
      nearest = j;
    }
    xi_out[j] = std::exp(-q / b.denom[j]);
    s1 += xi_out[j];
  }
  if (s1 <= 0.0) {
    for (std::size_t j = 0; j < n; ++j) xi_out[j] = 0.0;
    xi_out[nearest] = 1.0;
    return;
  }
  for (std::size_t j = 0; j < n; ++j) xi_out[j] /= s1;
}

double regressor_norm(const FuzzyBasis& b, std::span<const double> Z) {
  const Sums s = activation_sums(b, Z);
  if (s.s1 <= 0.0) return 1.0;  // one-hot fallback
  return s.s2 / (s.s1 * s.s1);
}

FuzzyBasis make_grid_basis(const std::vector<std::pair<double, double>>& ranges,
                           const std::vector<int>& counts) {
  if (ranges.empty() || ranges.size() != counts.size())
    throw ConfigError("grid basis needs matching range and count lists");
  const int dim = static_cast<int>(ranges.size());
  std::vector<double> spacing(dim);
  double denom = 0.0;
  for (int d = 0; d < dim; ++d) {
    if (counts[d] < 2) throw ConfigError("grid basis needs at least two centers per dimension");
    if (!(ranges[d].second > ranges[d].first))
      throw ConfigError("grid basis ranges must be increasing");
    spacing[d] = (ranges[d].second - ranges[d].first) / (counts[d] - 1);
    denom += spacing[d] * spacing[d];
  }

  FuzzyBasis b;
  b.dim = dim;
  std::vector<int> idx(dim, 0);
  for (;;) {
    std::vector<double> c(dim);
    for (int d = 0; d < dim; ++d) c[d] = ranges[d].first + idx[d] * spacing[d];
    b.centers.push_back(std::move(c));
    b.denom.push_back(denom);
    int d = dim - 1;
    while (d >= 0 && ++idx[d] == counts[d]) idx[d--] = 0;
    if (d < 0) break;
  }
  b.validate();
  return b;
}

}  // namespace backstep
