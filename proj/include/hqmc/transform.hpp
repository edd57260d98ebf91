// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hqmc/expansion.hpp"
#include "hqmc/weights.hpp"

namespace hqmc {

// Convention: column vectors, and the action of U on a function is
// (A_U f)(x) = f(U x). On coefficients of degree m this is
// J^* (U^T)^{(x)m} J, so linear coefficients transform as U^T v.

enum class OrthoProvenance { Identity, Householder, FromConstruction, UserSupplied, RandomQR };

std::string to_string(OrthoProvenance p);

inline constexpr double kOrthogonalityTolerance = 1e-10;

/// Validated d x d orthogonal matrix.
class OrthoMatrix {
 public:
  /// Throws DomainError (with the residual) unless max|U^T U - I| <= 1e-10.
  explicit OrthoMatrix(Eigen::MatrixXd u, OrthoProvenance provenance = OrthoProvenance::UserSupplied);

  static OrthoMatrix identity(std::size_t d);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return u_; }
  double operator()(std::size_t i, std::size_t j) const { return u_(i, j); }
  OrthoProvenance provenance() const noexcept { return provenance_; }
  /// max|U^T U - I| measured at construction.
  double residual() const noexcept { return residual_; }

  OrthoMatrix transpose() const;
  /// Matrix product this * other.
  OrthoMatrix operator*(const OrthoMatrix& other) const;

  /// Signed permutation: every row and column holds one entry of exactly +-1.
  bool is_signed_permutation() const;

 private:
  Eigen::MatrixXd u_;
  OrthoProvenance provenance_;
  double residual_;
};

enum class ConstructionKind { Forward, BrownianBridge, PCA };

std::string to_string(ConstructionKind kind);

/// Path construction B = M x on the grid {1/d, ..., d/d}; M M^T = C with
/// C_ij = min(i, j) / d.
class ConstructionMatrix {
 public:
  /// Validates M M^T = C to 1e-10 (ComputationError otherwise).
  ConstructionMatrix(Eigen::MatrixXd m, ConstructionKind kind);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  ConstructionKind kind() const noexcept { return kind_; }

 private:
  Eigen::MatrixXd m_;
  ConstructionKind kind_;
};

/// Discrete Brownian covariance C_ij = min(i, j) / d.
Eigen::MatrixXd brownian_covariance(std::size_t d);

/// Forward: cumulative sums scaled by 1/sqrt(d). BrownianBridge: terminal
/// point first, then the midpoint of the longest open interval (earliest
/// first). PCA: M = E Lambda^{1/2}, eigenvalues descending, each eigenvector
/// signed so its first non-negligible entry is positive.
ConstructionMatrix construction_matrix(ConstructionKind kind, std::size_t d);

/// U = L^{-1} M with L the forward factor, so that L U = M.
OrthoMatrix orthogonal_from_construction(const ConstructionMatrix& m);

/// Orthogonal U with U e_1 = v / ||v||. Throws DomainError when ||v|| <= 1e-12.
OrthoMatrix householder_from_linear(std::span<const double> v);

/// Deterministic orthogonal matrix from the QR factorization of a seeded
/// Gaussian matrix, with R's diagonal made positive.
OrthoMatrix random_orthogonal(std::size_t d, std::uint64_t seed);

/// Largest number of doubles one degree block may occupy (d^m <= 2^24).
inline constexpr std::uint64_t kTransformBudget = std::uint64_t{1} << 24;

/// Exact Hermite coefficients of x -> f(U x) for the degree <= m part of f.
/// Every stored degree block is lifted to the d^{m'} tensor space, U^T is
/// applied one mode at a time and the result is projected back; the output
/// holds every index of each degree that occurs in the input. Signed
/// permutations skip the tensor work and relabel the stored indices, so they
/// keep sparsity and accept any degree.
/// Throws DomainError for stored degrees above m, DimensionError for a
/// dimension mismatch and SizeError when a block exceeds the budget.
CoeffMap apply_transform(const OrthoMatrix& u, const CoeffMap& coeffs, std::uint64_t max_degree,
                         int threads = 1);
/// Same, with m the largest stored degree.
CoeffMap apply_transform(const OrthoMatrix& u, const CoeffMap& coeffs);

/// norm(spec, apply_transform(u, coeffs, m)).
NormResult transformed_norm(const WeightSpec& spec, const OrthoMatrix& u, const CoeffMap& coeffs,
                            std::uint64_t max_degree);

/// The d = 2, degree-2 case written out with explicit matrices.
struct J2Demo {
  /// Rows beta = (1,1), (1,2), (2,1), (2,2); columns k = (2,0), (1,1), (0,2).
  Eigen::Matrix<double, 4, 3> j2;
  Eigen::Matrix<double, 3, 4> j2_adjoint;
  /// kron(U^T, U^T), the degree-2 action under the f(Ux) convention.
  Eigen::Matrix4d kron;
  /// j2_adjoint * kron * j2 * input.
  Eigen::Vector3d via_matrices;
  /// apply_transform restricted to degree 2, same index order.
  Eigen::Vector3d via_apply;
  double residual = 0.0;
};

/// `input` holds (f^(2,0), f^(1,1), f^(0,2)).
J2Demo j2_matrix_demo(const OrthoMatrix& u, const std::array<double, 3>& input);

enum class LinearSource { Supplied, Quadrature };

std::string to_string(LinearSource s);

struct RegressionTransform {
  OrthoMatrix u;
  std::vector<double> linear;
  LinearSource source;
};

/// Householder transform from the stored degree-1 coefficients.
RegressionTransform regression_transform(const CoeffMap& coeffs);
/// Householder transform from degree-1 coefficients estimated by quadrature.
RegressionTransform regression_transform(const ScalarField& f, std::size_t d, std::size_t quad_order,
                                         int threads = 1);

/// Row-major CSV after the version line.
std::string matrix_to_csv(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_csv(const std::string& text);
std::string to_csv(const OrthoMatrix& u);
std::string to_csv(const ConstructionMatrix& m);
OrthoMatrix ortho_matrix_from_csv(const std::string& text);
OrthoMatrix load_ortho_matrix(const std::string& path);

}  // namespace hqmc
