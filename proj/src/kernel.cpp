// SPDX-License-Identifier: Apache-2.0
#include "hqmc/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/hermite.hpp"
#include "hqmc/parallel.hpp"

namespace hqmc {

namespace {

void require_dims(const WeightSpec& spec, std::span<const double> x, std::span<const double> y) {
  if (x.size() != spec.dim() || y.size() != spec.dim()) {
    throw DimensionError("kernel arguments must have the spec dimension " +
                         std::to_string(spec.dim()));
  }
}

void require_exponential(const WeightSpec& spec, const char* what) {
  if (spec.family() != WeightFamily::Exponential) {
    throw DomainError(std::string(what) + " requires the exponential family");
  }
}

double mehler_factor(double gamma, double omega, double x, double y) {
  const double one_minus = 1.0 - omega * omega;
  const double diff = x - y;
  const double expo = omega / (1.0 + omega) * x * y - omega * omega * diff * diff / (2.0 * one_minus);
  return 1.0 - gamma + gamma / std::sqrt(one_minus) * std::exp(expo);
}

// Features a_j[k-1] = sqrt(r_j(k)) H_k(x_j), k = 1..m, so that each univariate
// series factor is 1 + <a_j(x), a_j(y)>.
std::vector<double> series_features(const WeightSpec& spec, std::span<const double> x,
                                    std::uint64_t m) {
  const std::size_t d = spec.dim();
  std::vector<double> out(d * m);
  std::vector<double> table(m + 1);
  for (std::size_t j = 0; j < d; ++j) {
    hermite_table(m, x[j], table);
    for (std::uint64_t k = 1; k <= m; ++k) {
      out[j * m + (k - 1)] = std::sqrt(spec.univariate(j, k)) * table[k];
    }
  }
  return out;
}

double series_from_features(std::size_t d, std::uint64_t m, const double* a, const double* b) {
  double prod = 1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < m; ++k) acc += a[j * m + k] * b[j * m + k];
    prod *= 1.0 + acc;
  }
  return prod;
}

}  // namespace

double kernel_eval_series(const WeightSpec& spec, std::span<const double> x,
                          std::span<const double> y, std::uint64_t max_degree) {
  require_dims(spec, x, y);
  double prod = 1.0;
  std::vector<double> hx(max_degree + 1), hy(max_degree + 1);
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    hermite_table(max_degree, x[j], hx);
    hermite_table(max_degree, y[j], hy);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= max_degree; ++k) acc += spec.univariate(j, k) * hx[k] * hy[k];
    prod *= 1.0 + acc;
  }
  return prod;
}

double kernel_eval_mehler(const WeightSpec& spec, std::span<const double> x,
                          std::span<const double> y) {
  require_exponential(spec, "kernel_eval_mehler");
  require_dims(spec, x, y);
  double prod = 1.0;
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    prod *= mehler_factor(spec.gamma()[j], spec.omega()[j], x[j], y[j]);
  }
  return prod;
}

CoeffMap kernel_section(const WeightSpec& spec, std::span<const double> y, std::uint64_t max_degree) {
  if (y.size() != spec.dim()) throw DimensionError("kernel_section: point dimension mismatch");
  CoeffMap::Storage entries;
  for_each_up_to_degree(spec.dim(), max_degree, [&](const MultiIndex& k) {
    entries.emplace_hint(entries.end(), k, weight_value(spec, k) * hermite_eval_multi(k, y));
  });
  return CoeffMap(spec.dim(), std::move(entries), Provenance::Analytic);
}

KernelMode KernelMode::default_for(const WeightSpec& spec) {
  return spec.family() == WeightFamily::Exponential ? mehler() : series();
}

WceResult worst_case_error(const WeightSpec& spec, const PointSet& points, KernelMode mode,
                           int threads) {
  const std::size_t n = points.size();
  const std::size_t d = points.dim();
  if (n == 0) throw DomainError("worst_case_error: point set is empty");
  if (d != spec.dim()) {
    throw DimensionError("worst_case_error: points have dimension " + std::to_string(d) +
                         " but spec has " + std::to_string(spec.dim()));
  }
  const bool mehler = mode.kind == KernelMode::Kind::Mehler;
  if (mehler) require_exponential(spec, "Mehler kernel mode");

  const std::uint64_t m = mode.max_degree;
  std::vector<double> features;
  if (!mehler) {
    features.resize(n * d * m);
    for (std::size_t i = 0; i < n; ++i) {
      auto f = series_features(spec, points[i], m);
      std::copy(f.begin(), f.end(), features.begin() + static_cast<std::ptrdiff_t>(i * d * m));
    }
  }

  std::vector<double> row_sums(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double acc = 0.0;
      for (std::size_t l = 0; l < n; ++l) {
        acc += mehler ? kernel_eval_mehler(spec, points[i], points[l])
                      : series_from_features(d, m, &features[i * d * m], &features[l * d * m]);
      }
      row_sums[i] = acc;
    }
  });
  double total = 0.0;
  for (double s : row_sums) total += s;

  const double nn = static_cast<double>(n);
  WceResult out;
  out.radicand = -1.0 + total / (nn * nn);
  out.clamped = out.radicand < 0.0;
  out.value = std::sqrt(std::max(0.0, out.radicand));
  return out;
}

double rms_error(const WeightSpec& spec, std::uint64_t n) {
  if (n == 0) throw DomainError("rms_error: n must be positive");
  return std::sqrt((weight_sum(spec) - 1.0) / static_cast<double>(n));
}

UpperBounds wce_upper_bound(const WeightSpec& spec, std::uint64_t n) {
  if (n == 0) throw DomainError("wce_upper_bound: n must be positive");
  double sum_gamma = 0.0;
  for (double g : spec.gamma()) sum_gamma += g;
  const auto& decay = spec.decay();
  double rate = 0.0;
  if (spec.family() == WeightFamily::Polynomial) {
    rate = riemann_zeta(*std::min_element(decay.begin(), decay.end()));
  } else {
    const double w = *std::max_element(decay.begin(), decay.end());
    rate = w / (1.0 - w);
  }
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  UpperBounds out;
  out.family = inv_sqrt_n * std::exp(0.5 * rate * sum_gamma);
  out.existence = rms_error(spec, n);
  return out;
}

double lower_bound_constant(double omega) {
  const double s = std::sqrt(1.0 - omega * omega);
  return (1.0 - s) / s;
}

double wce_lower_bound_exp(const WeightSpec& spec, std::uint64_t n) {
  require_exponential(spec, "wce_lower_bound_exp");
  if (n == 0) throw DomainError("wce_lower_bound_exp: n must be positive");
  double prod = 1.0;
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    const double g = spec.gamma()[j];
    if (!(g < 1.0)) {
      throw DomainError("wce_lower_bound_exp requires every gamma_j < 1 (kernel positivity)");
    }
    prod *= 1.0 + g * lower_bound_constant(spec.omega()[j]);
  }
  return std::sqrt(std::max(0.0, -1.0 + prod / static_cast<double>(n)));
}

ErrorReport make_error_report(const WeightSpec& spec, const PointSet& points, KernelMode mode,
                              int threads) {
  const auto wce = worst_case_error(spec, points, mode, threads);
  ErrorReport r;
  r.wce = wce.value;
  r.clamped = wce.clamped;
  r.n = points.size();
  r.d = points.dim();
  r.rms = rms_error(spec, r.n);
  r.upper_bound = wce_upper_bound(spec, r.n).family;
  if (spec.family() == WeightFamily::Exponential &&
      std::all_of(spec.gamma().begin(), spec.gamma().end(), [](double g) { return g < 1.0; })) {
    r.lower_bound = wce_lower_bound_exp(spec, r.n);
  }
  r.family = to_string(spec.family());
  r.kernel = mode.kind == KernelMode::Kind::Mehler
                 ? "mehler"
                 : "series:" + std::to_string(mode.max_degree);
  return r;
}

std::string to_json(const ErrorReport& r) {
  nlohmann::ordered_json j;
  j["wce"] = r.wce;
  j["rms"] = r.rms;
  j["upper_bound"] = r.upper_bound;
  j["lower_bound"] = r.lower_bound ? nlohmann::ordered_json(*r.lower_bound) : nlohmann::ordered_json();
  j["n"] = r.n;
  j["d"] = r.d;
  j["family"] = r.family;
  j["kernel"] = r.kernel;
  j["clamped"] = r.clamped;
  return j.dump(2);
}

ErrorReport error_report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    ErrorReport r;
    r.wce = j.at("wce").get<double>();
    r.rms = j.at("rms").get<double>();
    r.upper_bound = j.at("upper_bound").get<double>();
    if (!j.at("lower_bound").is_null()) r.lower_bound = j.at("lower_bound").get<double>();
    r.n = j.at("n").get<std::uint64_t>();
    r.d = j.at("d").get<std::size_t>();
    r.family = j.at("family").get<std::string>();
    r.kernel = j.at("kernel").get<std::string>();
    r.clamped = j.at("clamped").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("error report JSON: ") + e.what());
  }
}

namespace {
constexpr const char* kReportHeader = "wce,rms,upper_bound,lower_bound,n,d,family,kernel,clamped";
}

std::string to_csv(const ErrorReport& r) {
  std::string out(csv::kVersionLine);
  out += "\n";
  out += kReportHeader;
  out += "\n";
  out += csv::format_double(r.wce) + "," + csv::format_double(r.rms) + "," +
         csv::format_double(r.upper_bound) + "," +
         (r.lower_bound ? csv::format_double(*r.lower_bound) : std::string()) + "," +
         std::to_string(r.n) + "," + std::to_string(r.d) + "," + r.family + "," + r.kernel + "," +
         (r.clamped ? "1" : "0") + "\n";
  return out;
}

ErrorReport error_report_from_csv(const std::string& text) {
  const auto rows = csv::parse_rows(text);
  if (rows.size() != 2 || rows[0].size() != 9 || rows[1].size() != 9) {
    throw FormatError("error report CSV needs a header row and one 9-field data row");
  }
  const auto& f = rows[1];
  ErrorReport r;
  r.wce = csv::parse_double(f[0]);
  r.rms = csv::parse_double(f[1]);
  r.upper_bound = csv::parse_double(f[2]);
  if (!f[3].empty()) r.lower_bound = csv::parse_double(f[3]);
  r.n = csv::parse_unsigned(f[4]);
  r.d = csv::parse_unsigned(f[5]);
  r.family = f[6];
  r.kernel = f[7];
  r.clamped = f[8] == "1";
  return r;
}

std::string to_string(TractabilityDiagnostic diag) {
  switch (diag) {
    case TractabilityDiagnostic::StrongPolynomial:
      return "consistent with strong polynomial tractability";
    case TractabilityDiagnostic::Polynomial:
      return "consistent with polynomial tractability";
    case TractabilityDiagnostic::Neither:
      return "no tractability condition supported at this horizon";
  }
  return "unknown";
}

TractabilityReport tractability_report(const SequenceRules& rules, std::size_t horizon,
                                       double epsilon) {
  if (horizon == 0) throw DomainError("tractability_report: horizon must be positive");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("tractability_report: epsilon must lie in (0, 1)");
  if (!rules.gamma || !rules.decay) throw DomainError("tractability_report: gamma and decay rules are required");

  TractabilityReport rep;
  rep.family = rules.family;
  rep.horizon = horizon;
  rep.epsilon = epsilon;
  const bool poly = rules.family == WeightFamily::Polynomial;
  const double log_eps2 = -2.0 * std::log(epsilon);
  const double log_lower_den = std::log(epsilon * epsilon + 1.0);

  std::vector<double> partial(horizon + 1, 0.0);
  double extreme = poly ? std::numeric_limits<double>::infinity() : 0.0;  // alpha_min / omega_max
  double omega_min = 1.0;
  bool lower_valid = !poly;
  std::vector<double> gammas(horizon);
  for (std::size_t j = 1; j <= horizon; ++j) {
    const double g = rules.gamma(j);
    const double p = rules.decay(j);
    if (!(g > 0.0)) throw DomainError("tractability_report: gamma_j must be positive");
    if (poly && !(p > 1.0)) throw DomainError("tractability_report: alpha_j must exceed 1");
    if (!poly && !(p > 0.0 && p < 1.0)) throw DomainError("tractability_report: omega_j must lie in (0,1)");
    gammas[j - 1] = g;
    partial[j] = partial[j - 1] + g;
    extreme = poly ? std::min(extreme, p) : std::max(extreme, p);
    const double rate = poly ? riemann_zeta(extreme) : extreme / (1.0 - extreme);
    rep.log_n_min_upper.push_back(log_eps2 + rate * partial[j]);
    if (!poly) {
      omega_min = std::min(omega_min, p);
      if (!(g < 1.0)) lower_valid = false;
    }
  }
  if (lower_valid) {
    // c(omega_min) with omega_min taken over the first d coordinates.
    double running_min = 1.0;
    for (std::size_t j = 1; j <= horizon; ++j) {
      running_min = std::min(running_min, rules.decay(j));
      const double c = lower_bound_constant(running_min);
      double log_prod = 0.0;
      for (std::size_t i = 0; i < j; ++i) log_prod += std::log1p(gammas[i] * c);
      rep.log_n_min_lower.push_back(log_prod - log_lower_den);
    }
  }

  rep.sum_gamma = partial[horizon];
  const auto ratio = [&](std::size_t dd) {
    return dd >= 2 ? partial[dd] / std::log(static_cast<double>(dd)) : 0.0;
  };
  rep.sum_gamma_over_log = ratio(horizon);
  const auto early = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(horizon))));
  rep.sum_gamma_over_log_early = ratio(early);
  rep.tail_fraction = (partial[horizon] - partial[horizon / 2]) / partial[horizon];

  // Heuristic reading of the finite data: a vanishing share from the upper half
  // of the horizon suggests a convergent series; a ratio to ln D that has not
  // grown since sqrt(D) suggests logarithmic growth.
  if (horizon >= 4 && rep.tail_fraction < 0.01) {
    rep.diagnostic = TractabilityDiagnostic::StrongPolynomial;
  } else if (early >= 2 && rep.sum_gamma_over_log <= 1.25 * rep.sum_gamma_over_log_early) {
    rep.diagnostic = TractabilityDiagnostic::Polynomial;
  } else {
    rep.diagnostic = TractabilityDiagnostic::Neither;
  }
  return rep;
}

std::string to_json(const TractabilityReport& r) {
  nlohmann::ordered_json j;
  j["family"] = to_string(r.family);
  j["horizon"] = r.horizon;
  j["epsilon"] = r.epsilon;
  j["sum_gamma"] = r.sum_gamma;
  j["sum_gamma_over_log_horizon"] = r.sum_gamma_over_log;
  j["sum_gamma_over_log_sqrt_horizon"] = r.sum_gamma_over_log_early;
  j["tail_fraction"] = r.tail_fraction;
  j["log_n_min_upper_at_horizon"] = r.log_n_min_upper.back();
  j["log_n_min_lower_at_horizon"] =
      r.log_n_min_lower.empty() ? nlohmann::ordered_json() : nlohmann::ordered_json(r.log_n_min_lower.back());
  j["diagnostic"] = to_string(r.diagnostic);
  j["note"] = "finite-horizon diagnostics over j <= horizon; not a proof of tractability";
  return j.dump(2);
}

}  // namespace hqmc
