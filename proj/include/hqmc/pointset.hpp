// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hqmc {

enum class Generator { GaussianIID, HaltonMapped, GridMapped, FromFile };

std::string to_string(Generator g);

/// n points in R^d, row-major, with the metadata that regenerates them.
class PointSet {
 public:
  PointSet(std::size_t dim, std::vector<double> coords, Generator generator,
           std::uint64_t seed = 0, std::uint64_t skip = 0);

  std::size_t size() const noexcept { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  const std::vector<double>& coords() const noexcept { return coords_; }
  Generator generator() const noexcept { return generator_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t skip() const noexcept { return skip_; }

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  Generator generator_;
  std::uint64_t seed_;
  std::uint64_t skip_;
};

/// Phi^{-1}(u) for u in (0, 1): rational approximation refined by one Halley
/// step against erfc.
double inverse_normal_cdf(double u);

/// Standard normal CDF via erfc.
double normal_cdf(double x);

/// Radical inverse of `index` in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

inline constexpr std::size_t kMaxHaltonDim = 64;

/// Halton points with indices skip+1, ..., skip+n (index 0 is never used),
/// mapped coordinate-wise through Phi^{-1}. Bases are the first d primes.
PointSet pointset_halton_mapped(std::size_t n, std::size_t d, std::uint64_t skip = 0);

/// Tensor grid of the midpoints (i + 1/2)/m, i < m, in each coordinate,
/// mapped through Phi^{-1}; m^d points.
PointSet pointset_grid_mapped(std::size_t per_dim, std::size_t d);

/// Standard normal deviates from a counter-based uniform stream.
PointSet pointset_gaussian_iid(std::size_t n, std::size_t d, std::uint64_t seed);

/// CSV lines `x_1,...,x_d` after the version comment line.
std::string to_csv(const PointSet& points);
PointSet point_set_from_csv(const std::string& text);
PointSet load_point_set(const std::string& path);

}  // namespace hqmc
