// SPDX-License-Identifier: Apache-2.0
#include "hqmc/qmc.hpp"

#include <algorithm>
#include <cmath>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/kernel.hpp"
#include "hqmc/parallel.hpp"
#include "hqmc/transform.hpp"

namespace hqmc {

double qmc_integrate(const ScalarField& f, const PointSet& points, int threads) {
  const std::size_t n = points.size();
  if (n == 0) throw DomainError("qmc_integrate: point set is empty");
  std::vector<double> values(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) values[i] = f(points[i]);
  });
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values[i])) {
      throw ComputationError("integrand is not finite at point " + std::to_string(i));
    }
    acc += values[i];
  }
  return acc / static_cast<double>(n);
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.dims = {1, 2, 4, 8, 16, 32, 64};
  for (int p = 7; p <= 14; ++p) c.ns.push_back(std::uint64_t{1} << p);
  c.gamma = [](std::size_t j) { return 1.0 / static_cast<double>(j * j); };
  c.alpha = [](std::size_t) { return 2u; };
  return c;
}

double truncated_exp_norm_squared(const WeightSpec& spec, std::span<const double> w,
                                  std::uint64_t max_degree) {
  const std::size_t d = spec.dim();
  if (w.size() != d) throw DimensionError("truncated_exp_norm_squared: dimension mismatch");
  double ww = 0.0;
  for (double v : w) ww += v * v;
  // Degree-graded convolution of a_j(k) = w_j^{2k} / (k! r_j(k)); entry t of
  // `acc` is the sum over indices of total degree t in the first j coordinates.
  std::vector<double> acc(max_degree + 1, 0.0);
  acc[0] = 1.0;
  std::vector<double> a(max_degree + 1), next(max_degree + 1);
  for (std::size_t j = 0; j < d; ++j) {
    const double s = w[j] * w[j];
    double term = 1.0;
    a[0] = 1.0;
    for (std::uint64_t k = 1; k <= max_degree; ++k) {
      term *= s / static_cast<double>(k);
      a[k] = term / spec.univariate(j, k);
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t t = 0; t <= max_degree; ++t) {
      if (acc[t] == 0.0) continue;
      for (std::uint64_t k = 0; t + k <= max_degree; ++k) next[t + k] += acc[t] * a[k];
    }
    acc.swap(next);
  }
  double total = 0.0;
  for (double v : acc) total += v;
  return std::exp(ww) * total;
}

std::vector<ExperimentRow> run_forward_vs_bb_experiment(const ExperimentConfig& config) {
  if (!config.gamma || !config.alpha) throw DomainError("experiment needs gamma and alpha rules");
  std::vector<std::size_t> dims = config.dims;
  std::vector<std::uint64_t> ns = config.ns;
  std::sort(dims.begin(), dims.end());
  std::sort(ns.begin(), ns.end());
  if (dims.empty() || ns.empty()) throw DomainError("experiment needs at least one d and one n");
  const double mean = std::exp(0.5);

  std::vector<ExperimentRow> rows;
  for (std::size_t d : dims) {
    if (d == 0 || d > kMaxHaltonDim) {
      throw DimensionError("experiment dimensions must lie in [1, " + std::to_string(kMaxHaltonDim) + "]");
    }
    std::vector<double> alpha(d), gamma(d);
    for (std::size_t j = 0; j < d; ++j) {
      alpha[j] = config.alpha(j + 1);
      gamma[j] = config.gamma(j + 1);
    }
    const auto spec = WeightSpec::polynomial(alpha, gamma);
    const std::vector<double> w(d, 1.0 / std::sqrt(static_cast<double>(d)));
    const auto u = orthogonal_from_construction(construction_matrix(ConstructionKind::BrownianBridge, d));
    Eigen::VectorXd wv = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(d));
    const Eigen::VectorXd wbb = u.matrix().transpose() * wv;
    const std::vector<double> wbb_std(wbb.data(), wbb.data() + d);

    const double norm_forward = std::sqrt(exp_function_norm_squared(spec, w));
    const double norm_bb = std::sqrt(exp_function_norm_squared(spec, wbb_std));
    double log_lower = 1.0 - static_cast<double>(d) * std::log(static_cast<double>(d));
    for (double g : gamma) log_lower -= std::log(g);
    const double lower = std::exp(0.5 * log_lower);
    const double truncated = std::sqrt(truncated_exp_norm_squared(spec, w, config.truncation_degree));

    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    const ScalarField f_forward = [inv_sqrt_d](std::span<const double> x) {
      double s = 0.0;
      for (double v : x) s += v;
      return std::exp(inv_sqrt_d * s);
    };
    const Eigen::MatrixXd um = u.matrix();
    const ScalarField f_bb = [inv_sqrt_d, &um](std::span<const double> x) {
      const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
      return std::exp(inv_sqrt_d * (um * xv).sum());
    };

    for (std::uint64_t n : ns) {
      const auto points = pointset_halton_mapped(n, d, config.skip);
      ExperimentRow row;
      row.d = d;
      row.n = n;
      row.norm_forward = norm_forward;
      row.norm_bb = norm_bb;
      row.lower_bound_forward = lower;
      row.qmc_err_forward = std::abs(qmc_integrate(f_forward, points, config.threads) - mean);
      row.qmc_err_bb = std::abs(qmc_integrate(f_bb, points, config.threads) - mean);
      row.rms_bound = rms_error(spec, n);
      row.norm_forward_truncated = truncated;
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {
constexpr const char* kExperimentHeader =
    "d,n,norm_forward,norm_bb,lower_bound_forward,qmc_err_forward,qmc_err_bb,rms_bound,"
    "norm_forward_truncated";
}

std::string to_csv(const std::vector<ExperimentRow>& rows) {
  std::string out(csv::kVersionLine);
  out += '\n';
  out += kExperimentHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.d) + ',' + std::to_string(r.n) + ',' + csv::format_double(r.norm_forward) +
           ',' + csv::format_double(r.norm_bb) + ',' + csv::format_double(r.lower_bound_forward) + ',' +
           csv::format_double(r.qmc_err_forward) + ',' + csv::format_double(r.qmc_err_bb) + ',' +
           csv::format_double(r.rms_bound) + ',' +
           csv::format_double(r.norm_forward_truncated) + '\n';
  }
  return out;
}

std::vector<ExperimentRow> experiment_rows_from_csv(const std::string& text) {
  const auto rows = csv::parse_rows(text);
  if (rows.empty() || rows[0].size() != 9 || rows[0][0] != "d") {
    throw FormatError("experiment CSV needs the 9-column header row");
  }
  std::vector<ExperimentRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 9) throw FormatError("experiment CSV row " + std::to_string(i) + " needs 9 fields");
    ExperimentRow r;
    r.d = csv::parse_unsigned(f[0]);
    r.n = csv::parse_unsigned(f[1]);
    r.norm_forward = csv::parse_double(f[2]);
    r.norm_bb = csv::parse_double(f[3]);
    r.lower_bound_forward = csv::parse_double(f[4]);
    r.qmc_err_forward = csv::parse_double(f[5]);
    r.qmc_err_bb = csv::parse_double(f[6]);
    r.rms_bound = csv::parse_double(f[7]);
    r.norm_forward_truncated = csv::parse_double(f[8]);
    out.push_back(r);
  }
  return out;
}

}  // namespace hqmc
