// SPDX-License-Identifier: Apache-2.0
#include "hqmc/hermite.hpp"

#include <cmath>
#include <string>

#include "hqmc/errors.hpp"

namespace hqmc {

namespace {

void require_point_dim(const MultiIndex& k, std::span<const double> x) {
  if (x.size() != k.dim()) {
    throw DimensionError("point has dimension " + std::to_string(x.size()) +
                         " but multi-index has " + std::to_string(k.dim()));
  }
}

}  // namespace

double hermite_eval(std::uint64_t k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (std::uint64_t j = 1; j < k; ++j) {
    const double next =
        (x * cur - std::sqrt(static_cast<double>(j)) * prev) / std::sqrt(static_cast<double>(j + 1));
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_table(std::uint64_t max_k, double x, std::span<double> out) {
  out[0] = 1.0;
  if (max_k == 0) return;
  out[1] = x;
  for (std::uint64_t j = 1; j < max_k; ++j) {
    out[j + 1] = (x * out[j] - std::sqrt(static_cast<double>(j)) * out[j - 1]) /
                 std::sqrt(static_cast<double>(j + 1));
  }
}

std::vector<double> hermite_table(std::uint64_t max_k, double x) {
  std::vector<double> out(max_k + 1);
  hermite_table(max_k, x, out);
  return out;
}

double hermite_eval_multi(const MultiIndex& k, std::span<const double> x) {
  require_point_dim(k, x);
  double prod = 1.0;
  for (std::size_t j = 0; j < k.dim(); ++j) prod *= hermite_eval(k[j], x[j]);
  return prod;
}

double hermite_deriv_multi(const MultiIndex& k, const MultiIndex& ell, std::span<const double> x) {
  require_point_dim(k, x);
  if (ell.dim() != k.dim()) {
    throw DimensionError("derivative order has dimension " + std::to_string(ell.dim()) +
                         " but multi-index has " + std::to_string(k.dim()));
  }
  if (!ell.dominated_by(k)) return 0.0;
  double scale = 1.0;
  double value = 1.0;
  for (std::size_t j = 0; j < k.dim(); ++j) {
    // k_j! / (k_j - l_j)! = (k_j - l_j + 1) ... k_j
    for (std::uint64_t i = k[j] - ell[j] + 1; i <= k[j]; ++i) scale *= static_cast<double>(i);
    value *= hermite_eval(k[j] - ell[j], x[j]);
  }
  return std::sqrt(scale) * value;
}

}  // namespace hqmc
