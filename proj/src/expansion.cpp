// SPDX-License-Identifier: Apache-2.0
#include "hqmc/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/hermite.hpp"
#include "hqmc/parallel.hpp"

namespace hqmc {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t j = 0; j < x.size(); ++j) os << (j ? "," : "") << x[j];
  os << ')';
  return os.str();
}

// Newton polish of a root of H_n using H_n' = sqrt(n) H_{n-1}.
double polish_root(std::size_t n, double x) {
  std::vector<double> table(n + 1);
  for (int iter = 0; iter < 4; ++iter) {
    hermite_table(n, x, table);
    const double deriv = std::sqrt(static_cast<double>(n)) * table[n - 1];
    if (deriv == 0.0) break;
    const double step = table[n] / deriv;
    x -= step;
    if (std::fabs(step) <= 1e-16 * std::max(1.0, std::fabs(x))) break;
  }
  return x;
}

}  // namespace

QuadratureRule gauss_hermite_rule(std::size_t n) {
  if (n < 1 || n > kMaxQuadratureOrder) {
    throw DomainError("gauss_hermite_rule: order must lie in [1, " +
                      std::to_string(kMaxQuadratureOrder) + "]");
  }
  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {0.0};
    rule.weights = {1.0};
    return rule;
  }
  // Jacobi matrix of the orthonormal recurrence: zero diagonal, sqrt(k) off it.
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
  for (std::size_t k = 1; k < n; ++k) sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ComputationError("gauss_hermite_rule: tridiagonal eigen-iteration did not converge for n = " +
                           std::to_string(n));
  }
  std::vector<double> raw(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  std::sort(raw.begin(), raw.end());

  rule.nodes.resize(n);
  // Symmetric rule: polish the nonnegative half and mirror it.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double x = polish_root(n, 0.5 * (raw[n - 1 - i] - raw[i]));
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;

  rule.weights.resize(n);
  std::vector<double> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    hermite_table(n - 1, rule.nodes[i], table);
    double christoffel = 0.0;
    for (std::size_t k = n; k-- > 0;) christoffel += table[k] * table[k];
    rule.weights[i] = 1.0 / christoffel;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += rule.weights[i];
  for (auto& w : rule.weights) w /= total;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double w = 0.5 * (rule.weights[i] + rule.weights[n - 1 - i]);
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  return rule;
}

std::string to_csv(const QuadratureRule& rule) {
  std::string out(csv::kVersionLine);
  out += "\nnode,weight\n";
  for (std::size_t i = 0; i < rule.order(); ++i) {
    out += csv::format_double(rule.nodes[i]) + "," + csv::format_double(rule.weights[i]) + "\n";
  }
  return out;
}

CoeffMap estimate_coeffs(const ScalarField& f, std::size_t d, std::uint64_t max_degree,
                         std::size_t quad_order, int threads) {
  if (d == 0) throw DimensionError("estimate_coeffs: dimension must be positive");
  if (quad_order < max_degree + 1) {
    throw DomainError("estimate_coeffs: quadrature order " + std::to_string(quad_order) +
                      " cannot resolve degree " + std::to_string(max_degree));
  }
  const double grid_log = static_cast<double>(d) * std::log(static_cast<double>(quad_order));
  if (grid_log > std::log(static_cast<double>(kMaxTensorGrid)) + 1e-9) {
    throw SizeError("estimate_coeffs: tensor grid " + std::to_string(quad_order) + "^" +
                    std::to_string(d) + " exceeds " + std::to_string(kMaxTensorGrid) + " nodes");
  }
  const QuadratureRule rule = gauss_hermite_rule(quad_order);
  const std::size_t n = quad_order;
  std::size_t grid = 1;
  for (std::size_t j = 0; j < d; ++j) grid *= n;

  // f on the tensor grid, last coordinate fastest.
  std::vector<double> values(grid);
  parallel_for(grid, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> x(d);
    for (std::size_t flat = begin; flat < end; ++flat) {
      std::size_t rem = flat;
      for (std::size_t j = d; j-- > 0;) {
        x[j] = rule.nodes[rem % n];
        rem /= n;
      }
      const double v = f(x);
      if (!std::isfinite(v)) {
        throw ComputationError("estimate_coeffs: integrand is not finite at node " + format_point(x));
      }
      values[flat] = v;
    }
  });

  // basis[k * n + i] = w_i H_k(x_i)
  const std::size_t kdim = static_cast<std::size_t>(max_degree) + 1;
  std::vector<double> basis(kdim * n);
  {
    std::vector<double> table(kdim);
    for (std::size_t i = 0; i < n; ++i) {
      hermite_table(max_degree, rule.nodes[i], table);
      for (std::size_t k = 0; k < kdim; ++k) basis[k * n + i] = rule.weights[i] * table[k];
    }
  }

  // Contract the leading grid axis each step and append the degree axis, so
  // after d steps the layout is (k_1, ..., k_d) with k_d fastest.
  std::vector<double> current = std::move(values);
  std::size_t rest = grid / n;  // product of remaining grid axes
  std::size_t done = 1;         // product of finished degree axes
  for (std::size_t step = 0; step < d; ++step) {
    const std::size_t outer = rest;  // remaining axes after removing the leading one
    std::vector<double> next(outer * done * kdim);
    // current layout: [i][r][done], r over `outer` remaining grid positions.
    for (std::size_t r = 0; r < outer; ++r) {
      for (std::size_t q = 0; q < done; ++q) {
        for (std::size_t k = 0; k < kdim; ++k) {
          double acc = 0.0;
          const double* b = &basis[k * n];
          for (std::size_t i = 0; i < n; ++i) acc += b[i] * current[(i * outer + r) * done + q];
          next[(r * done + q) * kdim + k] = acc;
        }
      }
    }
    current = std::move(next);
    done *= kdim;
    rest = step + 1 < d ? rest / n : 1;
  }

  CoeffMap::Storage entries;
  for_each_up_to_degree(d, max_degree, [&](const MultiIndex& k) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < d; ++j) flat = flat * kdim + k[j];
    entries.emplace(k, current[flat]);
  });
  return CoeffMap(d, std::move(entries), Provenance::Quadrature);
}

void visit_exp_coeffs(std::span<const double> w, std::uint64_t max_degree,
                      const std::function<void(const MultiIndex&, double)>& visit) {
  const std::size_t d = w.size();
  if (d == 0) throw DimensionError("exp coefficients need a nonempty direction vector");
  double ww = 0.0;
  for (double v : w) ww += v * v;
  const double scale = std::exp(0.5 * ww);
  // per-coordinate factors w_j^k / sqrt(k!)
  std::vector<std::vector<double>> factors(d, std::vector<double>(max_degree + 1));
  for (std::size_t j = 0; j < d; ++j) {
    factors[j][0] = 1.0;
    for (std::uint64_t k = 1; k <= max_degree; ++k) {
      factors[j][k] = factors[j][k - 1] * w[j] / std::sqrt(static_cast<double>(k));
    }
  }
  for_each_up_to_degree(d, max_degree, [&](const MultiIndex& k) {
    double v = scale;
    for (std::size_t j = 0; j < d; ++j) v *= factors[j][k[j]];
    visit(k, v);
  });
}

CoeffMap analytic_coeffs_exp(std::span<const double> w, std::uint64_t max_degree) {
  CoeffMap::Storage entries;
  visit_exp_coeffs(w, max_degree, [&](const MultiIndex& k, double v) {
    if (v != 0.0) entries.emplace_hint(entries.end(), k, v);
  });
  return CoeffMap(w.size(), std::move(entries), Provenance::Analytic);
}

CoeffMap analytic_coeffs_polynomial(std::size_t d, CoeffMap::Storage hermite_coeffs) {
  return CoeffMap(d, std::move(hermite_coeffs), Provenance::Analytic);
}

double eval_expansion(const CoeffMap& coeffs, std::span<const double> x) {
  const std::size_t d = coeffs.dim();
  if (x.size() != d) {
    throw DimensionError("eval_expansion: point has dimension " + std::to_string(x.size()) +
                         " but coefficients have " + std::to_string(d));
  }
  std::vector<std::uint64_t> max_k(d, 0);
  for (const auto& [k, v] : coeffs.entries()) {
    for (std::size_t j = 0; j < d; ++j) max_k[j] = std::max<std::uint64_t>(max_k[j], k[j]);
  }
  std::vector<std::vector<double>> tables(d);
  for (std::size_t j = 0; j < d; ++j) tables[j] = hermite_table(max_k[j], x[j]);
  double acc = 0.0;
  for (const auto& [k, v] : coeffs.entries()) {
    double h = v;
    for (std::size_t j = 0; j < d; ++j) h *= tables[j][k[j]];
    acc += h;
  }
  return acc;
}

double exp_function_norm_squared(const WeightSpec& spec, std::span<const double> w) {
  if (w.size() != spec.dim()) {
    throw DimensionError("exp_function_norm_squared: direction has dimension " +
                         std::to_string(w.size()) + " but spec has " + std::to_string(spec.dim()));
  }
  double ww = 0.0;
  for (double v : w) ww += v * v;
  double prod = std::exp(ww);
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    const double g = spec.gamma()[j];
    const double s = w[j] * w[j];
    double series = 0.0;  // sum_{k>=1} r_j(k)^{-1} s^k / k! * g
    if (spec.family() == WeightFamily::Exponential) {
      series = std::expm1(s / spec.omega()[j]);
    } else {
      const double a = spec.alpha()[j];
      if (std::fabs(a - std::round(a)) > 1e-12) {
        throw DomainError("exp_function_norm_squared: polynomial family needs integer alpha");
      }
      series = s * touchard_m(static_cast<unsigned>(std::lround(a)), s) * std::exp(s);
    }
    prod *= 1.0 + series / g;
  }
  return prod;
}

ShiftCheck coeff_shift_check(const ScalarFunction& f, const ScalarFunction& df_operator,
                             std::uint64_t k, std::size_t quad_order) {
  const QuadratureRule rule = gauss_hermite_rule(quad_order);
  ShiftCheck out;
  std::vector<double> table(k + 2);
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const double x = rule.nodes[i];
    hermite_table(k + 1, x, table);
    const double fx = f(x);
    const double dfx = df_operator(x);
    if (!std::isfinite(fx) || !std::isfinite(dfx)) {
      throw ComputationError("coeff_shift_check: non-finite value at node " + csv::format_double(x));
    }
    out.lhs += rule.weights[i] * fx * table[k];
    out.rhs += rule.weights[i] * dfx * table[k + 1];
  }
  out.rhs = -out.rhs / std::sqrt(static_cast<double>(k + 1));
  out.residual = out.lhs - out.rhs;
  return out;
}

}  // namespace hqmc
