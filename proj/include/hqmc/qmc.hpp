// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hqmc/expansion.hpp"
#include "hqmc/pointset.hpp"

namespace hqmc {

/// Q_{n,d}(f, P) = (1/n) sum_i f(x_i), summed in point order. Throws
/// ComputationError naming the point index on a non-finite value.
double qmc_integrate(const ScalarField& f, const PointSet& points, int threads = 1);

/// Setup for the forward vs Brownian bridge comparison on
/// f_d(x) = exp(d^{-1/2} sum_j x_j) with polynomial weights.
struct ExperimentConfig {
  std::vector<std::size_t> dims;
  std::vector<std::uint64_t> ns;
  /// gamma_j and alpha_j for j = 1, 2, ...; alpha_j must be an integer.
  std::function<double(std::size_t)> gamma;
  std::function<unsigned(std::size_t)> alpha;
  /// Degree of the truncated-coefficient norm column.
  std::uint64_t truncation_degree = 40;
  std::uint64_t skip = 0;
  int threads = 1;

  /// alpha_j = 2, gamma_j = j^{-2}, d in {1, 2, 4, 8, 16, 32, 64},
  /// n in {2^7, ..., 2^14}.
  static ExperimentConfig defaults();
};

struct ExperimentRow {
  std::size_t d = 0;
  std::uint64_t n = 0;
  double norm_forward = 0.0;
  double norm_bb = 0.0;
  /// sqrt(e d^{-d} / prod_j gamma_j), the norm contribution of the index
  /// (1, ..., 1); equals sqrt(e (d!)^2 / d^d) for gamma_j = j^{-2}.
  double lower_bound_forward = 0.0;
  double qmc_err_forward = 0.0;
  double qmc_err_bb = 0.0;
  double rms_bound = 0.0;
  /// Norm of the coefficients with |k| <= truncation_degree.
  double norm_forward_truncated = 0.0;
};

/// Rows sorted by (d, n). Halton-mapped points with the configured skip.
std::vector<ExperimentRow> run_forward_vs_bb_experiment(const ExperimentConfig& config);

/// Columns d,n,norm_forward,norm_bb,lower_bound_forward,qmc_err_forward,
/// qmc_err_bb,rms_bound,norm_forward_truncated after the version line.
std::string to_csv(const std::vector<ExperimentRow>& rows);
std::vector<ExperimentRow> experiment_rows_from_csv(const std::string& text);

/// sum_{|k| <= m} r(k)^{-1} f^(k)^2 for f = exp(w^T x), streamed without
/// storing the coefficients.
double truncated_exp_norm_squared(const WeightSpec& spec, std::span<const double> w,
                                  std::uint64_t max_degree);

}  // namespace hqmc
