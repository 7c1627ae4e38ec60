#pragma once

#include <span>
#include <utility>
#include <vector>

namespace backstep {

// Normalized Gaussian fuzzy basis over R^dim:
//
//   zeta_j(Z) = exp(-|Z - l_j|^2 / (eta_j' eta_j)),   xi_j = zeta_j / sum_k zeta_k
//
// Only the normalized vector (and mostly just |xi|^2) is ever consumed: the
// adaptive laws estimate a single scalar per stage, so rule weights are never
// materialized.
struct FuzzyBasis {
  int dim = 0;
  std::vector<std::vector<double>> centers;  // centers[j] has size dim
  std::vector<double> denom;                 // eta_j' eta_j > 0, per rule

  [[nodiscard]] int rule_count() const { return static_cast<int>(centers.size()); }
  void validate() const;  // throws ConfigError
};

// Normalized activation vector; xi_out.size() == rule_count().  Sum is 1 by
// construction; if every exponential underflows to zero the nearest-center
// rule gets xi = 1 so the partition-of-unity property survives.
void basis(const FuzzyBasis& b, std::span<const double> Z, std::span<double> xi_out);

// |xi(Z)|^2 without materializing xi; equals sum(zeta^2)/sum(zeta)^2 and lies
// in [1/N, 1].
double regressor_norm(const FuzzyBasis& b, std::span<const double> Z);

// Evenly spaced center grid over the given per-dimension ranges, counts[d]
// centers along dimension d; every rule's width vector is the per-dimension
// spacing, so denom = sum_d spacing_d^2.
FuzzyBasis make_grid_basis(const std::vector<std::pair<double, double>>& ranges,
                           const std::vector<int>& counts);

}  // namespace backstep
