// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hqmc/pointset.hpp"
#include "hqmc/weights.hpp"

namespace hqmc {

/// Per-coordinate truncation degree used for series kernels when none is given.
inline constexpr std::uint64_t kDefaultKernelDegree = 60;

/// K_r(x, y) = prod_j (1 + sum_{k=1}^{m} r_j(k) H_k(x_j) H_k(y_j)).
/// The product form truncates each coordinate at degree m, which contains
/// every index with |k| <= m.
double kernel_eval_series(const WeightSpec& spec, std::span<const double> x,
                          std::span<const double> y, std::uint64_t max_degree);

/// Closed form of the exponential-family kernel from Mehler's formula.
double kernel_eval_mehler(const WeightSpec& spec, std::span<const double> x,
                          std::span<const double> y);

/// Coefficients of the kernel section K_r(., y) over |k| <= m.
CoeffMap kernel_section(const WeightSpec& spec, std::span<const double> y, std::uint64_t max_degree);

struct KernelMode {
  enum class Kind { Series, Mehler } kind = Kind::Mehler;
  std::uint64_t max_degree = kDefaultKernelDegree;

  static KernelMode series(std::uint64_t m = kDefaultKernelDegree) { return {Kind::Series, m}; }
  static KernelMode mehler() { return {Kind::Mehler, kDefaultKernelDegree}; }
  /// Mehler for the exponential family, series otherwise.
  static KernelMode default_for(const WeightSpec& spec);
};

struct WceResult {
  double value = 0.0;
  /// -1 + (1/n^2) sum_{i,j} K(x_i, x_j) before the clamp.
  double radicand = 0.0;
  /// The radicand was negative (truncation round-off) and was clamped to 0.
  bool clamped = false;
};

/// Worst-case QMC error e_{n,d}(P) = (-1 + n^{-2} sum_{i,j} K(x_i, x_j))^{1/2}.
/// The double sum is evaluated row by row (rows optionally in parallel) and
/// reduced in row order, so the result does not depend on `threads`.
WceResult worst_case_error(const WeightSpec& spec, const PointSet& points, KernelMode mode,
                           int threads = 1);

/// Gaussian root-mean-square worst-case error (1/sqrt(n)) (sum_k r(k) - 1)^{1/2}.
double rms_error(const WeightSpec& spec, std::uint64_t n);

struct UpperBounds {
  /// Family bound: exp((zeta(alpha_min)/2) sum gamma_j) / sqrt(n), or
  /// exp((omega_max / (2 (1 - omega_max))) sum gamma_j) / sqrt(n).
  double family = 0.0;
  /// Existence bound c(d)/sqrt(n) with c(d) = (sum_k r(k) - 1)^{1/2}.
  double existence = 0.0;
};

UpperBounds wce_upper_bound(const WeightSpec& spec, std::uint64_t n);

/// c(omega) = (1 - sqrt(1 - omega^2)) / sqrt(1 - omega^2).
double lower_bound_constant(double omega);

/// Lower bound (max(0, -1 + prod_j (1 + gamma_j c(omega_j)) / n))^{1/2}, valid
/// for every point set when all gamma_j < 1.
double wce_lower_bound_exp(const WeightSpec& spec, std::uint64_t n);

/// Aggregated error figures for one (spec, point set) pair.
struct ErrorReport {
  double wce = 0.0;
  double rms = 0.0;
  double upper_bound = 0.0;
  std::optional<double> lower_bound;
  std::uint64_t n = 0;
  std::size_t d = 0;
  std::string family;
  std::string kernel;
  bool clamped = false;
};

ErrorReport make_error_report(const WeightSpec& spec, const PointSet& points, KernelMode mode,
                              int threads = 1);

std::string to_json(const ErrorReport& report);
ErrorReport error_report_from_json(const std::string& text);
/// Version line, header row, one data row.
std::string to_csv(const ErrorReport& report);
ErrorReport error_report_from_csv(const std::string& text);

/// Infinite weight-parameter sequences indexed from j = 1.
struct SequenceRules {
  WeightFamily family = WeightFamily::Polynomial;
  std::function<double(std::size_t)> gamma;
  /// alpha_j (polynomial) or omega_j (exponential).
  std::function<double(std::size_t)> decay;
};

enum class TractabilityDiagnostic {
  StrongPolynomial,  // partial sums of gamma appear to converge
  Polynomial,        // sum gamma_j / ln d appears bounded
  Neither,           // neither condition is supported by the finite data
};

std::string to_string(TractabilityDiagnostic diag);

/// Finite-horizon evaluation of the tractability conditions. Nothing here is a
/// proof: every figure is computed for j <= horizon only.
struct TractabilityReport {
  WeightFamily family = WeightFamily::Polynomial;
  std::size_t horizon = 0;
  double epsilon = 0.0;
  double sum_gamma = 0.0;
  /// sum_{j<=D} gamma_j / ln D (0 when D == 1).
  double sum_gamma_over_log = 0.0;
  /// Same ratio at D' = floor(sqrt(D)), used to judge boundedness.
  double sum_gamma_over_log_early = 0.0;
  /// Share of the partial sum contributed by j in (D/2, D].
  double tail_fraction = 0.0;
  /// log of the upper estimate eps^{-2} exp(c sum gamma_j) for each d = 1..D,
  /// with c = zeta(alpha_min) or omega_max/(1-omega_max).
  std::vector<double> log_n_min_upper;
  /// log of prod_j (1 + gamma_j c(omega_min)) / (eps^2 + 1) for each d = 1..D;
  /// exponential family with all gamma_j < 1 only.
  std::vector<double> log_n_min_lower;
  TractabilityDiagnostic diagnostic = TractabilityDiagnostic::Neither;
};

TractabilityReport tractability_report(const SequenceRules& rules, std::size_t horizon,
                                       double epsilon);

std::string to_json(const TractabilityReport& report);

}  // namespace hqmc
