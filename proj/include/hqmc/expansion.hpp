// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hqmc/weights.hpp"

namespace hqmc {

/// Real-valued function on R^d. Must be safe to call concurrently when used
/// with more than one thread.
using ScalarField = std::function<double(std::span<const double>)>;
using ScalarFunction = std::function<double(double)>;

/// Gauss-Hermite rule for the standard Gaussian density: weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const noexcept { return nodes.size(); }
};

inline constexpr std::size_t kMaxQuadratureOrder = 256;
/// Largest tensor grid estimate_coeffs will evaluate.
inline constexpr std::uint64_t kMaxTensorGrid = 100'000'000;

/// n-point rule, exact for polynomials of degree <= 2n-1. Nodes come from the
/// Golub-Welsch eigenproblem, are polished by Newton steps on H_n, and weights
/// use the Christoffel form 1 / sum_{k<n} H_k(x_i)^2, which keeps full relative
/// accuracy in the tails.
QuadratureRule gauss_hermite_rule(std::size_t n);

/// Two-column CSV `node,weight`.
std::string to_csv(const QuadratureRule& rule);

/// Tensor-product quadrature estimate of every coefficient with |k| <= m.
CoeffMap estimate_coeffs(const ScalarField& f, std::size_t d, std::uint64_t max_degree,
                         std::size_t quad_order, int threads = 1);

/// Coefficients of x -> exp(w^T x): e^{w^T w / 2} w^k / sqrt(k!).
CoeffMap analytic_coeffs_exp(std::span<const double> w, std::uint64_t max_degree);

/// Streams the same coefficients as analytic_coeffs_exp without storing them.
void visit_exp_coeffs(std::span<const double> w, std::uint64_t max_degree,
                      const std::function<void(const MultiIndex&, double)>& visit);

/// Validated pass-through for coefficients already known in the Hermite basis.
CoeffMap analytic_coeffs_polynomial(std::size_t d, CoeffMap::Storage hermite_coeffs);

/// sum_k f^(k) H_k(x) over the stored indices.
double eval_expansion(const CoeffMap& coeffs, std::span<const double> x);

/// ||exp(w^T .)||_r^2 in closed form. Exponential family:
/// e^{w.w} prod_j (1 + gamma_j^{-1} (e^{w_j^2/omega_j} - 1)); polynomial family
/// (integer alpha_j only): e^{w.w} prod_j (1 + gamma_j^{-1} w_j^2 m_{alpha_j}(w_j^2) e^{w_j^2}).
double exp_function_norm_squared(const WeightSpec& spec, std::span<const double> w);

struct ShiftCheck {
  double lhs = 0.0;       // f^(k)
  double rhs = 0.0;       // -(D f)^(k+1) / sqrt(k+1)
  double residual = 0.0;  // lhs - rhs
};

/// Checks the integration-by-parts identity f^(k) = -(D f)^(k+1)/sqrt(k+1)
/// for D f = f' - x f, both sides by one-dimensional quadrature.
ShiftCheck coeff_shift_check(const ScalarFunction& f, const ScalarFunction& df_operator,
                             std::uint64_t k, std::size_t quad_order);

}  // namespace hqmc
