// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hqmc {

/// Largest total degree for which factorial products and multinomial
/// coefficients are computed in exact 64-bit integer arithmetic (20! < 2^64).
/// Above this the log-gamma path is used.
inline constexpr std::uint64_t kExactFactorialLimit = 20;

/// Index of a d-variate Hermite basis function: a d-tuple of nonnegative
/// integers k = (k_1, ..., k_d).
class MultiIndex {
 public:
  using value_type = std::uint32_t;

  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim) : entries_(dim, 0) {}
  MultiIndex(std::initializer_list<value_type> entries) : entries_(entries) {}
  explicit MultiIndex(std::vector<value_type> entries) : entries_(std::move(entries)) {}

  static MultiIndex unit(std::size_t dim, std::size_t j);

  std::size_t dim() const noexcept { return entries_.size(); }
  value_type operator[](std::size_t j) const noexcept { return entries_[j]; }
  value_type& operator[](std::size_t j) noexcept { return entries_[j]; }
  std::span<const value_type> entries() const noexcept { return entries_; }

  /// |k| = sum of entries.
  std::uint64_t degree() const noexcept;
  bool is_zero() const noexcept;

  /// Componentwise k <= other.
  bool dominated_by(const MultiIndex& other) const;

  MultiIndex operator+(const MultiIndex& other) const;
  /// Componentwise difference; requires other <= *this.
  MultiIndex operator-(const MultiIndex& other) const;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<value_type> entries_;
};

/// Canonical basis order: total degree ascending, then lexicographically
/// descending within a degree, so (1,0) precedes (0,1) and
/// (2,0) < (1,1) < (0,2).
struct GradedOrder {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

struct MultiIndexHash {
  std::size_t operator()(const MultiIndex& k) const noexcept;
};

std::string to_string(const MultiIndex& k);

/// k! = prod_j k_j!, exact when |k| <= kExactFactorialLimit.
std::optional<std::uint64_t> exact_factorial_product(const MultiIndex& k);
/// log(k!) via lgamma, valid for any k.
double log_factorial_product(const MultiIndex& k);
/// k! as a double (exact integer path when available).
double factorial_product(const MultiIndex& k);

/// x^k = prod_j x_j^{k_j}.
double monomial(const MultiIndex& k, std::span<const double> x);

/// Number of multi-indices in d variables with |k| <= m, i.e. binomial(d+m, m).
/// Returns nullopt when the count does not fit in 64 bits.
std::optional<std::uint64_t> count_up_to_degree(std::size_t d, std::uint64_t m);
/// Number of multi-indices with |k| == m exactly, binomial(m+d-1, d-1).
std::optional<std::uint64_t> count_of_degree(std::size_t d, std::uint64_t m);

/// Visits every multi-index with |k| == degree in graded order.
void for_each_of_degree(std::size_t d, std::uint64_t degree,
                        const std::function<void(const MultiIndex&)>& visit);
/// Visits every multi-index with |k| <= max_degree in graded order.
void for_each_up_to_degree(std::size_t d, std::uint64_t max_degree,
                           const std::function<void(const MultiIndex&)>& visit);

/// Multiplicity of the map S : {1..d}^m -> N_0^d counting occurrences of each
/// coordinate, i.e. #{beta : S(beta) = k} = |k|! / k!.
struct Multiplicity {
  double value = 0.0;
  /// Set when |k| <= kExactFactorialLimit; `value` then equals it exactly
  /// whenever the integer is representable.
  std::optional<std::uint64_t> exact;
};

Multiplicity s_multiplicity(const MultiIndex& k);

/// All multi-indices with |k| <= m in graded order; the canonical coordinate
/// system for coefficient vectors.
class DegreeIndexSet {
 public:
  /// Refuses (SizeError) when the count exceeds kMaxCount.
  static constexpr std::uint64_t kMaxCount = 100'000'000;

  DegreeIndexSet(std::size_t d, std::uint64_t max_degree);

  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return indices_.size(); }
  const MultiIndex& operator[](std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

  auto begin() const { return indices_.begin(); }
  auto end() const { return indices_.end(); }

 private:
  std::size_t dim_;
  std::uint64_t max_degree_;
  std::vector<MultiIndex> indices_;
};

DegreeIndexSet enumerate_degree(std::size_t d, std::uint64_t max_degree);

}  // namespace hqmc
