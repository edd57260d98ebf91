// SPDX-License-Identifier: Apache-2.0
#include "hqmc/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {

void require_same_dim(const MultiIndex& a, const MultiIndex& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("multi-index dimensions differ: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()));
  }
}

// binomial(n, k) with overflow detection.
std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(result);
}

void visit_compositions(MultiIndex& k, std::size_t pos, std::uint64_t remaining,
                        const std::function<void(const MultiIndex&)>& visit) {
  const std::size_t d = k.dim();
  if (pos + 1 == d) {
    k[pos] = static_cast<MultiIndex::value_type>(remaining);
    visit(k);
    return;
  }
  // Descending in the leading coordinate gives the graded order.
  for (std::uint64_t v = remaining + 1; v-- > 0;) {
    k[pos] = static_cast<MultiIndex::value_type>(v);
    visit_compositions(k, pos + 1, remaining - v, visit);
  }
  k[pos] = 0;
}

}  // namespace

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t j) {
  MultiIndex e(dim);
  e[j] = 1;
  return e;
}

std::uint64_t MultiIndex::degree() const noexcept {
  return std::accumulate(entries_.begin(), entries_.end(), std::uint64_t{0});
}

bool MultiIndex::is_zero() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](auto v) { return v == 0; });
}

bool MultiIndex::dominated_by(const MultiIndex& other) const {
  require_same_dim(*this, other);
  for (std::size_t j = 0; j < dim(); ++j) {
    if (entries_[j] > other.entries_[j]) return false;
  }
  return true;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  require_same_dim(*this, other);
  MultiIndex out(*this);
  for (std::size_t j = 0; j < dim(); ++j) out.entries_[j] += other.entries_[j];
  return out;
}

MultiIndex MultiIndex::operator-(const MultiIndex& other) const {
  if (!other.dominated_by(*this)) {
    throw DomainError("multi-index subtraction requires " + to_string(other) + " <= " +
                      to_string(*this));
  }
  MultiIndex out(*this);
  for (std::size_t j = 0; j < dim(); ++j) out.entries_[j] -= other.entries_[j];
  return out;
}

bool GradedOrder::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const auto da = a.degree();
  const auto db = b.degree();
  if (da != db) return da < db;
  const std::size_t n = std::min(a.dim(), b.dim());
  for (std::size_t j = 0; j < n; ++j) {
    if (a[j] != b[j]) return a[j] > b[j];
  }
  return a.dim() < b.dim();
}

std::size_t MultiIndexHash::operator()(const MultiIndex& k) const noexcept {
  std::size_t h = 0xcbf29ce484222325ULL;
  for (auto v : k.entries()) {
    h ^= v;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_string(const MultiIndex& k) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < k.dim(); ++j) {
    if (j) os << ',';
    os << k[j];
  }
  os << ')';
  return os.str();
}

std::optional<std::uint64_t> exact_factorial_product(const MultiIndex& k) {
  if (k.degree() > kExactFactorialLimit) return std::nullopt;
  std::uint64_t prod = 1;
  for (auto v : k.entries()) {
    for (std::uint64_t i = 2; i <= v; ++i) prod *= i;
  }
  return prod;
}

double log_factorial_product(const MultiIndex& k) {
  double acc = 0.0;
  for (auto v : k.entries()) acc += std::lgamma(static_cast<double>(v) + 1.0);
  return acc;
}

double factorial_product(const MultiIndex& k) {
  if (auto exact = exact_factorial_product(k)) return static_cast<double>(*exact);
  return std::exp(log_factorial_product(k));
}

double monomial(const MultiIndex& k, std::span<const double> x) {
  if (x.size() != k.dim()) {
    throw DimensionError("monomial: point has dimension " + std::to_string(x.size()) +
                         ", index has " + std::to_string(k.dim()));
  }
  double prod = 1.0;
  for (std::size_t j = 0; j < k.dim(); ++j) prod *= std::pow(x[j], static_cast<double>(k[j]));
  return prod;
}

std::optional<std::uint64_t> count_up_to_degree(std::size_t d, std::uint64_t m) {
  return binomial(d + m, m);
}

std::optional<std::uint64_t> count_of_degree(std::size_t d, std::uint64_t m) {
  if (d == 0) return m == 0 ? 1 : 0;
  return binomial(m + d - 1, d - 1);
}

void for_each_of_degree(std::size_t d, std::uint64_t degree,
                        const std::function<void(const MultiIndex&)>& visit) {
  if (d == 0) throw DimensionError("dimension must be positive");
  MultiIndex k(d);
  visit_compositions(k, 0, degree, visit);
}

void for_each_up_to_degree(std::size_t d, std::uint64_t max_degree,
                           const std::function<void(const MultiIndex&)>& visit) {
  for (std::uint64_t m = 0; m <= max_degree; ++m) for_each_of_degree(d, m, visit);
}

Multiplicity s_multiplicity(const MultiIndex& k) {
  Multiplicity out;
  const std::uint64_t total = k.degree();
  if (total <= kExactFactorialLimit) {
    // Product of binomials C(k_1+...+k_j, k_j); every partial result divides
    // |k|! so nothing overflows below the limit.
    std::uint64_t acc = 1;
    std::uint64_t running = 0;
    for (auto v : k.entries()) {
      running += v;
      acc *= *binomial(running, v);
    }
    out.exact = acc;
    out.value = static_cast<double>(acc);
  } else {
    out.value = std::exp(std::lgamma(static_cast<double>(total) + 1.0) - log_factorial_product(k));
  }
  return out;
}

DegreeIndexSet::DegreeIndexSet(std::size_t d, std::uint64_t max_degree)
    : dim_(d), max_degree_(max_degree) {
  if (d == 0) throw DimensionError("enumerate_degree: dimension must be positive");
  const auto count = count_up_to_degree(d, max_degree);
  if (!count || *count > kMaxCount) {
    throw SizeError("enumerate_degree: binomial(" + std::to_string(d + max_degree) + ", " +
                    std::to_string(max_degree) + ") indices exceed the limit of " +
                    std::to_string(kMaxCount));
  }
  indices_.reserve(*count);
  for_each_up_to_degree(d, max_degree, [this](const MultiIndex& k) { indices_.push_back(k); });
}

DegreeIndexSet enumerate_degree(std::size_t d, std::uint64_t max_degree) {
  return DegreeIndexSet(d, max_degree);
}

}  // namespace hqmc
