// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "hqmc/multi_index.hpp"

namespace hqmc {

// All Hermite polynomials here are the orthonormal (probabilists') ones with
// respect to the standard Gaussian density: H_0 = 1, H_1 = x,
// H_{k+1}(x) = (x H_k(x) - sqrt(k) H_{k-1}(x)) / sqrt(k+1).

/// H_k(x) by the three-term recurrence.
double hermite_eval(std::uint64_t k, double x);

/// H_0(x), ..., H_max(x) in one pass.
std::vector<double> hermite_table(std::uint64_t max_k, double x);
void hermite_table(std::uint64_t max_k, double x, std::span<double> out);

/// H_k(x) = prod_j H_{k_j}(x_j).
double hermite_eval_multi(const MultiIndex& k, std::span<const double> x);

/// d^{|l|}/dx^l H_k(x) = sqrt(k!/(k-l)!) H_{k-l}(x) if l <= k, else 0.
double hermite_deriv_multi(const MultiIndex& k, const MultiIndex& ell, std::span<const double> x);

}  // namespace hqmc
