// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hqmc/multi_index.hpp"

namespace hqmc {

enum class WeightFamily { Polynomial, Exponential };

std::string to_string(WeightFamily family);

/// Product weight r : N_0^d -> R^+ defining a weighted Hermite space.
///
/// Polynomial family: r(k) = prod_j p_j(k_j) with p_j(0) = 1 and
/// p_j(k) = gamma_j * k^{-alpha_j} otherwise.
/// Exponential family: r(k) = prod_j e_j(k_j) with e_j(0) = 1 and
/// e_j(k) = gamma_j * omega_j^k otherwise.
///
/// Construction validates gamma_1 >= ... >= gamma_d > 0, alpha_j > 1 and
/// omega_j in (0, 1).
class WeightSpec {
 public:
  static WeightSpec polynomial(std::vector<double> alpha, std::vector<double> gamma);
  static WeightSpec exponential(std::vector<double> omega, std::vector<double> gamma);

  WeightFamily family() const noexcept { return family_; }
  std::size_t dim() const noexcept { return gamma_.size(); }
  const std::vector<double>& gamma() const noexcept { return gamma_; }
  /// alpha for Polynomial, omega for Exponential.
  const std::vector<double>& decay() const noexcept { return decay_; }
  const std::vector<double>& alpha() const;
  const std::vector<double>& omega() const;

  /// One-dimensional spec for coordinate j.
  WeightSpec coordinate(std::size_t j) const;

  /// Univariate factor r_j(k_j).
  double univariate(std::size_t j, std::uint64_t kj) const;
  double log_univariate(std::size_t j, std::uint64_t kj) const;

  friend bool operator==(const WeightSpec&, const WeightSpec&) = default;

 private:
  WeightSpec(WeightFamily family, std::vector<double> decay, std::vector<double> gamma);

  WeightFamily family_;
  std::vector<double> decay_;
  std::vector<double> gamma_;
};

/// JSON: {"family":"polynomial"|"exponential","gamma":[...],"alpha"|"omega":[...]}.
std::string to_json(const WeightSpec& spec);
WeightSpec weight_spec_from_json(const std::string& text);
WeightSpec load_weight_spec(const std::string& path);

enum class Provenance { Analytic, Quadrature, Transformed };

std::string to_string(Provenance p);

/// Sparse truncated Hermite expansion: multi-index -> coefficient f^(k).
/// Immutable once built.
class CoeffMap {
 public:
  using Storage = std::map<MultiIndex, double, GradedOrder>;

  CoeffMap(std::size_t dim, Storage entries, Provenance provenance = Provenance::Analytic);

  std::size_t dim() const noexcept { return dim_; }
  Provenance provenance() const noexcept { return provenance_; }
  const Storage& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Stored coefficient or 0.
  double at(const MultiIndex& k) const;
  /// Largest total degree among stored indices (0 when empty).
  std::uint64_t max_degree() const;
  /// Sum of squared coefficients (the L^2(phi) mass).
  double l2_mass() const;

 private:
  std::size_t dim_;
  Storage entries_;
  Provenance provenance_;
};

/// Lines `k_1,...,k_d,value`, preceded by the version comment line.
std::string to_csv(const CoeffMap& coeffs);
/// Dimension is inferred from the first data line; '#' lines are skipped.
CoeffMap coeff_map_from_csv(const std::string& text, Provenance provenance = Provenance::Analytic);
CoeffMap load_coeff_map(const std::string& path);

double weight_value(const WeightSpec& spec, const MultiIndex& k);
double log_weight_value(const WeightSpec& spec, const MultiIndex& k);

/// Closed-form sum of r(k) over all of N_0^d.
double weight_sum(const WeightSpec& spec);

/// zeta(alpha) for alpha > 1 by direct summation plus an Euler-Maclaurin tail.
double riemann_zeta(double alpha);

/// Squared-norm saturation threshold; any single term or the total above it
/// reports overflow.
inline constexpr double kNormOverflowThreshold = 1.7976931348623157e308;

struct NormResult {
  /// ||f||_r, or +infinity when overflowed.
  double value = 0.0;
  bool overflow = false;
  /// First index (in graded order) whose term r(k)^{-1} f^(k)^2 overflowed.
  std::optional<MultiIndex> offending;

  double squared() const { return value * value; }
};

/// Weighted norm (sum_k r(k)^{-1} f^(k)^2)^{1/2} over the stored indices.
NormResult norm(const WeightSpec& spec, const CoeffMap& coeffs);

/// Weighted inner product over the union of stored indices.
double inner_product(const WeightSpec& spec, const CoeffMap& a, const CoeffMap& b);

/// m_alpha(x) with sum_{k>=1} k^alpha x^k / k! = x m_alpha(x) e^x, via Stirling
/// numbers of the second kind. alpha in [1, 30].
double touchard_m(unsigned alpha, double x);

}  // namespace hqmc
