// SPDX-License-Identifier: Apache-2.0
#include "hqmc/weights.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"

namespace hqmc {

namespace {

void require_spec_dim(const WeightSpec& spec, const MultiIndex& k) {
  if (k.dim() != spec.dim()) {
    throw DimensionError("multi-index " + to_string(k) + " does not match spec dimension " +
                         std::to_string(spec.dim()));
  }
}

void require_same_dim(const WeightSpec& spec, const CoeffMap& c) {
  if (c.dim() != spec.dim()) {
    throw DimensionError("coefficients have dimension " + std::to_string(c.dim()) +
                         " but spec has " + std::to_string(spec.dim()));
  }
}

}  // namespace

std::string to_string(WeightFamily family) {
  return family == WeightFamily::Polynomial ? "polynomial" : "exponential";
}

WeightSpec::WeightSpec(WeightFamily family, std::vector<double> decay, std::vector<double> gamma)
    : family_(family), decay_(std::move(decay)), gamma_(std::move(gamma)) {
  if (gamma_.empty()) throw DimensionError("weight spec needs at least one coordinate");
  if (decay_.size() != gamma_.size()) {
    throw DimensionError("gamma has " + std::to_string(gamma_.size()) + " entries but " +
                         (family_ == WeightFamily::Polynomial ? "alpha" : "omega") + " has " +
                         std::to_string(decay_.size()));
  }
  for (std::size_t j = 0; j < gamma_.size(); ++j) {
    if (!(gamma_[j] > 0.0) || !std::isfinite(gamma_[j])) {
      throw DomainError("gamma_" + std::to_string(j + 1) + " must be positive and finite");
    }
    if (j > 0 && gamma_[j] > gamma_[j - 1]) {
      throw DomainError("gamma must be non-increasing (gamma_" + std::to_string(j + 1) + " > gamma_" +
                        std::to_string(j) + ")");
    }
    if (family_ == WeightFamily::Polynomial) {
      if (!(decay_[j] > 1.0) || !std::isfinite(decay_[j])) {
        throw DomainError("alpha_" + std::to_string(j + 1) + " must exceed 1");
      }
    } else if (!(decay_[j] > 0.0 && decay_[j] < 1.0)) {
      throw DomainError("omega_" + std::to_string(j + 1) + " must lie in (0, 1)");
    }
  }
}

WeightSpec WeightSpec::polynomial(std::vector<double> alpha, std::vector<double> gamma) {
  return WeightSpec(WeightFamily::Polynomial, std::move(alpha), std::move(gamma));
}

WeightSpec WeightSpec::exponential(std::vector<double> omega, std::vector<double> gamma) {
  return WeightSpec(WeightFamily::Exponential, std::move(omega), std::move(gamma));
}

const std::vector<double>& WeightSpec::alpha() const {
  if (family_ != WeightFamily::Polynomial) throw DomainError("alpha requested from exponential spec");
  return decay_;
}

const std::vector<double>& WeightSpec::omega() const {
  if (family_ != WeightFamily::Exponential) throw DomainError("omega requested from polynomial spec");
  return decay_;
}

WeightSpec WeightSpec::coordinate(std::size_t j) const {
  return WeightSpec(family_, {decay_.at(j)}, {gamma_.at(j)});
}

double WeightSpec::univariate(std::size_t j, std::uint64_t kj) const {
  if (kj == 0) return 1.0;
  const double k = static_cast<double>(kj);
  if (family_ == WeightFamily::Polynomial) return gamma_[j] * std::pow(k, -decay_[j]);
  return gamma_[j] * std::pow(decay_[j], k);
}

double WeightSpec::log_univariate(std::size_t j, std::uint64_t kj) const {
  if (kj == 0) return 0.0;
  const double k = static_cast<double>(kj);
  if (family_ == WeightFamily::Polynomial) return std::log(gamma_[j]) - decay_[j] * std::log(k);
  return std::log(gamma_[j]) + k * std::log(decay_[j]);
}

std::string to_json(const WeightSpec& spec) {
  nlohmann::json j;
  j["family"] = to_string(spec.family());
  j["gamma"] = spec.gamma();
  j[spec.family() == WeightFamily::Polynomial ? "alpha" : "omega"] = spec.decay();
  return j.dump();
}

WeightSpec weight_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("weight spec JSON: ") + e.what());
  }
  try {
    const auto family = j.at("family").get<std::string>();
    auto gamma = j.at("gamma").get<std::vector<double>>();
    if (family == "polynomial") {
      return WeightSpec::polynomial(j.at("alpha").get<std::vector<double>>(), std::move(gamma));
    }
    if (family == "exponential") {
      return WeightSpec::exponential(j.at("omega").get<std::vector<double>>(), std::move(gamma));
    }
    throw FormatError("weight spec JSON: unknown family '" + family + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("weight spec JSON: ") + e.what());
  }
}

WeightSpec load_weight_spec(const std::string& path) {
  return weight_spec_from_json(csv::read_file(path));
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Analytic: return "analytic";
    case Provenance::Quadrature: return "quadrature";
    case Provenance::Transformed: return "transformed";
  }
  return "unknown";
}

CoeffMap::CoeffMap(std::size_t dim, Storage entries, Provenance provenance)
    : dim_(dim), entries_(std::move(entries)), provenance_(provenance) {
  if (dim_ == 0) throw DimensionError("coefficient map needs positive dimension");
  for (const auto& [k, v] : entries_) {
    if (k.dim() != dim_) {
      throw DimensionError("coefficient index " + to_string(k) + " does not have dimension " +
                           std::to_string(dim_));
    }
    if (!std::isfinite(v)) throw DomainError("non-finite coefficient at " + to_string(k));
  }
}

double CoeffMap::at(const MultiIndex& k) const {
  const auto it = entries_.find(k);
  return it == entries_.end() ? 0.0 : it->second;
}

std::uint64_t CoeffMap::max_degree() const {
  return entries_.empty() ? 0 : entries_.rbegin()->first.degree();
}

double CoeffMap::l2_mass() const {
  double acc = 0.0;
  for (const auto& [k, v] : entries_) acc += v * v;
  return acc;
}

std::string to_csv(const CoeffMap& coeffs) {
  std::string out(csv::kVersionLine);
  out += '\n';
  for (const auto& [k, v] : coeffs.entries()) {
    for (std::size_t j = 0; j < k.dim(); ++j) {
      out += std::to_string(k[j]);
      out += ',';
    }
    out += csv::format_double(v);
    out += '\n';
  }
  return out;
}

CoeffMap coeff_map_from_csv(const std::string& text, Provenance provenance) {
  const auto rows = csv::parse_rows(text);
  if (rows.empty()) throw FormatError("coefficient CSV has no data rows");
  const std::size_t width = rows.front().size();
  if (width < 2) throw FormatError("coefficient CSV rows need k_1,...,k_d,value");
  CoeffMap::Storage entries;
  for (const auto& row : rows) {
    if (row.size() != width) throw FormatError("coefficient CSV rows have inconsistent widths");
    MultiIndex k(width - 1);
    for (std::size_t j = 0; j + 1 < width; ++j) {
      const auto v = csv::parse_unsigned(row[j]);
      if (v > std::numeric_limits<MultiIndex::value_type>::max()) {
        throw FormatError("multi-index entry out of range: " + row[j]);
      }
      k[j] = static_cast<MultiIndex::value_type>(v);
    }
    const double value = csv::parse_double(row.back());
    if (!entries.emplace(k, value).second) {
      throw FormatError("duplicate coefficient index " + to_string(k));
    }
  }
  return CoeffMap(width - 1, std::move(entries), provenance);
}

CoeffMap load_coeff_map(const std::string& path) { return coeff_map_from_csv(csv::read_file(path)); }

double weight_value(const WeightSpec& spec, const MultiIndex& k) {
  require_spec_dim(spec, k);
  double prod = 1.0;
  for (std::size_t j = 0; j < k.dim(); ++j) prod *= spec.univariate(j, k[j]);
  return prod;
}

double log_weight_value(const WeightSpec& spec, const MultiIndex& k) {
  require_spec_dim(spec, k);
  double acc = 0.0;
  for (std::size_t j = 0; j < k.dim(); ++j) acc += spec.log_univariate(j, k[j]);
  return acc;
}

double weight_sum(const WeightSpec& spec) {
  double prod = 1.0;
  for (std::size_t j = 0; j < spec.dim(); ++j) {
    const double g = spec.gamma()[j];
    const double p = spec.decay()[j];
    if (spec.family() == WeightFamily::Polynomial) {
      prod *= 1.0 + g * riemann_zeta(p);
    } else {
      prod *= 1.0 + g * p / (1.0 - p);
    }
  }
  return prod;
}

double riemann_zeta(double alpha) {
  if (!(alpha > 1.0)) throw DomainError("riemann_zeta requires alpha > 1");
  // Euler-Maclaurin with cut N: the remainder after the B_12 term is of order
  // alpha^13 N^{-alpha-13}, far below 1e-15 relative for the N used here.
  const int N = alpha < 16.0 ? 32 : 8;
  double head = 0.0;
  for (int k = N - 1; k >= 1; --k) head += std::pow(static_cast<double>(k), -alpha);
  const double n = N;
  double tail = std::pow(n, 1.0 - alpha) / (alpha - 1.0) + 0.5 * std::pow(n, -alpha);
  // B_{2j} / (2j)! for j = 1..6.
  static constexpr std::array<double, 6> kBernoulliOverFactorial = {
      1.0 / 12.0,         -1.0 / 720.0,           1.0 / 30240.0,
      -1.0 / 1209600.0,   1.0 / 47900160.0,       -691.0 / 1307674368000.0};
  double rising = alpha;  // alpha (alpha+1) ... (alpha+2j-2)
  double power = std::pow(n, -alpha - 1.0);
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    tail += kBernoulliOverFactorial[j] * rising * power;
    const double a = alpha + 2.0 * static_cast<double>(j);
    rising *= (a + 1.0) * (a + 2.0);
    power /= n * n;
  }
  return head + tail;
}

NormResult norm(const WeightSpec& spec, const CoeffMap& coeffs) {
  require_same_dim(spec, coeffs);
  static const double kLogThreshold = std::log(kNormOverflowThreshold);
  NormResult out;
  double acc = 0.0;
  for (const auto& [k, v] : coeffs.entries()) {
    if (v == 0.0) continue;
    const double log_term = 2.0 * std::log(std::fabs(v)) - log_weight_value(spec, k);
    if (log_term >= kLogThreshold) {
      out.overflow = true;
      out.offending = k;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    const double w = weight_value(spec, k);
    acc += (w >= 1e-300 && std::fabs(v) <= 1e150) ? v * v / w : std::exp(log_term);
  }
  if (!(acc < kNormOverflowThreshold)) {
    out.overflow = true;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = std::sqrt(acc);
  return out;
}

double inner_product(const WeightSpec& spec, const CoeffMap& a, const CoeffMap& b) {
  require_same_dim(spec, a);
  require_same_dim(spec, b);
  // Terms only survive on the intersection of supports.
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  double acc = 0.0;
  for (const auto& [k, v] : small.entries()) {
    const double w = large.at(k);
    if (w != 0.0) acc += v * w / weight_value(spec, k);
  }
  return acc;
}

double touchard_m(unsigned alpha, double x) {
  if (alpha < 1 || alpha > 30) throw DomainError("touchard_m requires 1 <= alpha <= 30");
  // Row alpha of the Stirling numbers of the second kind, S(n, j).
  std::vector<double> row(alpha + 1, 0.0);
  row[0] = 1.0;
  for (unsigned n = 1; n <= alpha; ++n) {
    for (unsigned j = n; j >= 1; --j) row[j] = static_cast<double>(j) * row[j] + row[j - 1];
    row[0] = 0.0;
  }
  // x m(x) = sum_j S(alpha, j) x^j, evaluated by Horner on m directly.
  double acc = 0.0;
  for (unsigned j = alpha; j >= 1; --j) acc = acc * x + row[j];
  return acc;
}

}  // namespace hqmc
