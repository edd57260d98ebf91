// SPDX-License-Identifier: Apache-2.0
#include "hqmc/pointset.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/random.hpp"

namespace hqmc {

namespace {

constexpr std::array<unsigned, kMaxHaltonDim> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

// Acklam's rational approximation, relative error below 1.15e-9.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;
  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - kLow) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log1p(-p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

// Lower-tail quantile for p <= 0.5 with one Halley step.
double lower_quantile(double p) {
  double x = acklam(p);
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  x -= u / (1.0 + 0.5 * x * u);
  return x;
}

}  // namespace

std::string to_string(Generator g) {
  switch (g) {
    case Generator::GaussianIID: return "gaussian-iid";
    case Generator::HaltonMapped: return "halton-mapped";
    case Generator::GridMapped: return "grid-mapped";
    case Generator::FromFile: return "file";
  }
  return "unknown";
}

PointSet::PointSet(std::size_t dim, std::vector<double> coords, Generator generator,
                   std::uint64_t seed, std::uint64_t skip)
    : dim_(dim), coords_(std::move(coords)), generator_(generator), seed_(seed), skip_(skip) {
  if (dim_ == 0) throw DimensionError("point set needs positive dimension");
  if (coords_.size() % dim_ != 0) {
    throw DimensionError("point coordinates do not form whole points of dimension " +
                         std::to_string(dim_));
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw DomainError("non-finite coordinate in point " + std::to_string(i / dim_));
    }
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("inverse_normal_cdf requires 0 < u < 1");
  if (u == 0.5) return 0.0;
  // 1 - u is exact for u > 0.5, so the upper half reuses the lower tail.
  return u < 0.5 ? lower_quantile(u) : -lower_quantile(1.0 - u);
}

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv_base = 1.0 / base;
  double scale = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale *= inv_base;
  }
  return result;
}

PointSet pointset_halton_mapped(std::size_t n, std::size_t d, std::uint64_t skip) {
  if (d == 0 || d > kMaxHaltonDim) {
    throw DimensionError("Halton points support 1 <= d <= " + std::to_string(kMaxHaltonDim));
  }
  if (n == 0) throw DomainError("point set needs at least one point");
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      coords[i * d + j] = inverse_normal_cdf(radical_inverse(skip + i + 1, kPrimes[j]));
    }
  }
  return PointSet(d, std::move(coords), Generator::HaltonMapped, 0, skip);
}

PointSet pointset_grid_mapped(std::size_t per_dim, std::size_t d) {
  if (d == 0) throw DimensionError("point set needs positive dimension");
  if (per_dim == 0) throw DomainError("point set needs at least one point");
  std::size_t n = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (n > 100'000'000 / per_dim) throw SizeError("grid point set is too large");
    n *= per_dim;
  }
  std::vector<double> axis(per_dim);
  for (std::size_t i = 0; i < per_dim; ++i) {
    axis[i] = inverse_normal_cdf((static_cast<double>(i) + 0.5) / static_cast<double>(per_dim));
  }
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t rem = i;
    for (std::size_t j = d; j-- > 0;) {
      coords[i * d + j] = axis[rem % per_dim];
      rem /= per_dim;
    }
  }
  return PointSet(d, std::move(coords), Generator::GridMapped);
}

PointSet pointset_gaussian_iid(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (d == 0) throw DimensionError("point set needs positive dimension");
  if (n == 0) throw DomainError("point set needs at least one point");
  std::vector<double> coords(n * d);
  for (std::size_t c = 0; c < coords.size(); ++c) {
    coords[c] = inverse_normal_cdf(counter_uniform(seed, c));
  }
  return PointSet(d, std::move(coords), Generator::GaussianIID, seed, 0);
}

std::string to_csv(const PointSet& points) {
  std::string out(csv::kVersionLine);
  out += '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto p = points[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out += ',';
      out += csv::format_double(p[j]);
    }
    out += '\n';
  }
  return out;
}

PointSet point_set_from_csv(const std::string& text) {
  const auto rows = csv::parse_rows(text);
  if (rows.empty()) throw FormatError("point CSV has no points");
  const std::size_t d = rows.front().size();
  std::vector<double> coords;
  coords.reserve(rows.size() * d);
  for (const auto& row : rows) {
    if (row.size() != d) throw FormatError("point CSV rows have inconsistent widths");
    for (const auto& field : row) {
      const double x = csv::parse_double(field);
      if (!std::isfinite(x)) throw FormatError("point CSV holds a non-finite value '" + field + "'");
      coords.push_back(x);
    }
  }
  return PointSet(d, std::move(coords), Generator::FromFile);
}

PointSet load_point_set(const std::string& path) { return point_set_from_csv(csv::read_file(path)); }

}  // namespace hqmc
