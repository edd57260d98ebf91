// SPDX-License-Identifier: Apache-2.0
#include "hqmc/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "hqmc/csv.hpp"
#include "hqmc/errors.hpp"
#include "hqmc/parallel.hpp"
#include "hqmc/pointset.hpp"
#include "hqmc/random.hpp"

namespace hqmc {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

std::string format_residual(double r) { return csv::format_double(r); }

Eigen::MatrixXd forward_factor(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) l(i, j) = s;
  }
  return l;
}

Eigen::MatrixXd brownian_bridge_factor(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  const double dd = static_cast<double>(d);
  // Row t-1 holds B(t/d); index 0 stands for B(0) = 0 and has no row.
  auto row = [&](std::size_t t) -> Eigen::RowVectorXd {
    if (t == 0) return Eigen::RowVectorXd::Zero(n);
    return m.row(static_cast<Eigen::Index>(t - 1));
  };
  Eigen::Index next = 0;
  m(n - 1, next++) = 1.0;  // B(1) = sqrt(1) x_1
  std::vector<std::pair<std::size_t, std::size_t>> open;
  if (d >= 2) open.emplace_back(0, d);
  while (!open.empty()) {
    auto it = std::min_element(open.begin(), open.end(), [](const auto& a, const auto& b) {
      const auto la = a.second - a.first;
      const auto lb = b.second - b.first;
      return la != lb ? la > lb : a.first < b.first;
    });
    const auto [l, r] = *it;
    open.erase(it);
    const std::size_t mid = (l + r) / 2;
    const double span = static_cast<double>(r - l);
    const double wl = static_cast<double>(r - mid) / span;
    const double wr = static_cast<double>(mid - l) / span;
    const double sigma = std::sqrt(static_cast<double>((mid - l) * (r - mid)) / (dd * span));
    Eigen::RowVectorXd new_row = wl * row(l) + wr * row(r);
    new_row(next++) += sigma;
    m.row(static_cast<Eigen::Index>(mid - 1)) = new_row;
    if (mid - l >= 2) open.emplace_back(l, mid);
    if (r - mid >= 2) open.emplace_back(mid, r);
  }
  return m;
}

// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= 1e-16 * scale) {
      return {a.diagonal(), v};
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  throw ComputationError("Jacobi eigen-decomposition did not converge");
}

Eigen::MatrixXd pca_factor(std::size_t d) {
  auto [values, vectors] = jacobi_eigen(brownian_covariance(d));
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const Eigen::Index src = order[static_cast<std::size_t>(c)];
    if (!(values(src) > 0.0)) throw ComputationError("covariance eigenvalue is not positive");
    Eigen::VectorXd e = vectors.col(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(e(i)) > 1e-8) {
        if (e(i) < 0.0) e = -e;
        break;
      }
    }
    m.col(c) = std::sqrt(values(src)) * e;
  }
  return m;
}

std::uint64_t checked_power(std::size_t d, std::uint64_t m) {
  std::uint64_t size = 1;
  for (std::uint64_t i = 0; i < m; ++i) {
    if (size > kTransformBudget / d) {
      throw SizeError("degree-" + std::to_string(m) + " block in dimension " + std::to_string(d) +
                      " exceeds the transform budget of " + std::to_string(kTransformBudget) +
                      " entries");
    }
    size *= d;
  }
  return size;
}

// Tensor offset of the sorted arrangement of k, coordinate of position i
// weighted by d^i.
std::uint64_t sorted_offset(const MultiIndex& k, const std::vector<std::uint64_t>& powers) {
  std::uint64_t offset = 0;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < k.dim(); ++j) {
    for (std::uint32_t c = 0; c < k[j]; ++c) offset += j * powers[pos++];
  }
  return offset;
}

double j_scale(const MultiIndex& k) {
  // sqrt(k! / |k|!)
  return std::exp(0.5 * (log_factorial_product(k) - std::lgamma(static_cast<double>(k.degree()) + 1.0)));
}

void transform_block(const Eigen::MatrixXd& u, std::size_t d, std::uint64_t m,
                     const std::vector<std::pair<MultiIndex, double>>& block,
                     CoeffMap::Storage& out, int threads) {
  if (m == 0) {
    for (const auto& [k, v] : block) out.emplace(k, v);
    return;
  }
  const std::uint64_t size = checked_power(d, m);
  std::vector<std::uint64_t> powers(m);
  powers[0] = 1;
  for (std::uint64_t i = 1; i < m; ++i) powers[i] = powers[i - 1] * d;

  // Lift through J: every arrangement beta of k receives sqrt(k!/|k|!) f^(k).
  std::vector<double> t(size, 0.0);
  std::vector<std::size_t> beta(m);
  for (const auto& [k, v] : block) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < d; ++j) {
      for (std::uint32_t c = 0; c < k[j]; ++c) beta[pos++] = j;
    }
    const double value = j_scale(k) * v;
    do {
      std::uint64_t offset = 0;
      for (std::uint64_t i = 0; i < m; ++i) offset += beta[i] * powers[i];
      t[offset] = value;
    } while (std::next_permutation(beta.begin(), beta.end()));
  }

  // Mode-by-mode application of U^T: t'[.., b, ..] = sum_a U(a, b) t[.., a, ..].
  std::vector<double> next(size);
  const std::size_t lines = size / d;
  for (std::uint64_t mode = 0; mode < m; ++mode) {
    const std::uint64_t stride = powers[mode];
    parallel_for(lines, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> line(d);
      for (std::size_t l = begin; l < end; ++l) {
        const std::uint64_t inner = l % stride;
        const std::uint64_t outer = l / stride;
        const std::uint64_t base = outer * stride * d + inner;
        for (std::size_t a = 0; a < d; ++a) line[a] = t[base + a * stride];
        for (std::size_t b = 0; b < d; ++b) {
          double acc = 0.0;
          for (std::size_t a = 0; a < d; ++a) acc += u(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * line[a];
          next[base + b * stride] = acc;
        }
      }
    });
    t.swap(next);
  }

  // Project through J^*: the |k|!/k! equal entries sum to sqrt(|k|!/k!) t'[beta].
  for_each_of_degree(d, m, [&](const MultiIndex& k) {
    out.emplace_hint(out.end(), k, t[sorted_offset(k, powers)] / j_scale(k));
  });
}

CoeffMap apply_signed_permutation(const OrthoMatrix& u, const CoeffMap& coeffs) {
  const std::size_t d = u.dim();
  std::vector<std::size_t> target(d);
  std::vector<double> sign(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (u(i, j) != 0.0) {
        target[i] = j;
        sign[i] = u(i, j);
      }
    }
  }
  // (Ux)_i = s_i x_{pi(i)}, so H_k(Ux) = prod_i s_i^{k_i} H_{k_i}(x_{pi(i)}).
  CoeffMap::Storage out;
  for (const auto& [k, v] : coeffs.entries()) {
    MultiIndex moved(d);
    double value = v;
    for (std::size_t i = 0; i < d; ++i) {
      moved[target[i]] = k[i];
      if (sign[i] < 0.0 && (k[i] % 2 == 1)) value = -value;
    }
    out.emplace(std::move(moved), value);
  }
  return CoeffMap(d, std::move(out), Provenance::Transformed);
}

}  // namespace

std::string to_string(OrthoProvenance p) {
  switch (p) {
    case OrthoProvenance::Identity: return "identity";
    case OrthoProvenance::Householder: return "householder";
    case OrthoProvenance::FromConstruction: return "from-construction";
    case OrthoProvenance::UserSupplied: return "user-supplied";
    case OrthoProvenance::RandomQR: return "random-qr";
  }
  return "unknown";
}

OrthoMatrix::OrthoMatrix(Eigen::MatrixXd u, OrthoProvenance provenance)
    : u_(std::move(u)), provenance_(provenance), residual_(0.0) {
  if (u_.rows() == 0 || u_.rows() != u_.cols()) {
    throw DimensionError("orthogonal matrix must be square and non-empty, got " +
                         std::to_string(u_.rows()) + "x" + std::to_string(u_.cols()));
  }
  if (!u_.allFinite()) throw DomainError("orthogonal matrix has non-finite entries");
  const auto n = u_.rows();
  residual_ = max_abs(u_.transpose() * u_ - Eigen::MatrixXd::Identity(n, n));
  if (!(residual_ <= kOrthogonalityTolerance)) {
    throw DomainError("matrix is not orthogonal: max|U^T U - I| = " + format_residual(residual_));
  }
}

OrthoMatrix OrthoMatrix::identity(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return OrthoMatrix(Eigen::MatrixXd::Identity(n, n), OrthoProvenance::Identity);
}

OrthoMatrix OrthoMatrix::transpose() const { return OrthoMatrix(u_.transpose(), provenance_); }

OrthoMatrix OrthoMatrix::operator*(const OrthoMatrix& other) const {
  if (dim() != other.dim()) throw DimensionError("orthogonal matrix product: dimension mismatch");
  return OrthoMatrix(u_ * other.u_, OrthoProvenance::UserSupplied);
}

bool OrthoMatrix::is_signed_permutation() const {
  const auto n = u_.rows();
  std::vector<int> col_count(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    int row_count = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double x = u_(i, j);
      if (x == 0.0) continue;
      if (x != 1.0 && x != -1.0) return false;
      ++row_count;
      ++col_count[static_cast<std::size_t>(j)];
    }
    if (row_count != 1) return false;
  }
  return std::all_of(col_count.begin(), col_count.end(), [](int c) { return c == 1; });
}

std::string to_string(ConstructionKind kind) {
  switch (kind) {
    case ConstructionKind::Forward: return "forward";
    case ConstructionKind::BrownianBridge: return "brownian-bridge";
    case ConstructionKind::PCA: return "pca";
  }
  return "unknown";
}

Eigen::MatrixXd brownian_covariance(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      c(i, j) = static_cast<double>(std::min(i, j) + 1) / static_cast<double>(d);
    }
  }
  return c;
}

ConstructionMatrix::ConstructionMatrix(Eigen::MatrixXd m, ConstructionKind kind)
    : m_(std::move(m)), kind_(kind) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionError("construction matrix must be square and non-empty");
  }
  const double residual =
      max_abs(m_ * m_.transpose() - brownian_covariance(static_cast<std::size_t>(m_.rows())));
  if (!(residual <= 1e-10)) {
    throw ComputationError(to_string(kind) + " construction violates M M^T = C: residual " +
                           format_residual(residual));
  }
}

ConstructionMatrix construction_matrix(ConstructionKind kind, std::size_t d) {
  if (d == 0) throw DimensionError("construction matrix needs d >= 1");
  switch (kind) {
    case ConstructionKind::Forward: return ConstructionMatrix(forward_factor(d), kind);
    case ConstructionKind::BrownianBridge: return ConstructionMatrix(brownian_bridge_factor(d), kind);
    case ConstructionKind::PCA: return ConstructionMatrix(pca_factor(d), kind);
  }
  throw DomainError("unknown construction kind");
}

OrthoMatrix orthogonal_from_construction(const ConstructionMatrix& m) {
  const Eigen::MatrixXd l = forward_factor(m.dim());
  Eigen::MatrixXd u = l.triangularView<Eigen::Lower>().solve(m.matrix());
  if (m.kind() == ConstructionKind::Forward) u = Eigen::MatrixXd::Identity(u.rows(), u.cols());
  const double fit = max_abs(l * u - m.matrix());
  if (!(fit <= 1e-10)) {
    throw ComputationError("L U = M violated: residual " + format_residual(fit));
  }
  try {
    return OrthoMatrix(std::move(u), m.kind() == ConstructionKind::Forward
                                          ? OrthoProvenance::Identity
                                          : OrthoProvenance::FromConstruction);
  } catch (const DomainError& e) {
    throw ComputationError(std::string("construction factor: ") + e.what());
  }
}

OrthoMatrix householder_from_linear(std::span<const double> v) {
  const std::size_t d = v.size();
  if (d == 0) throw DimensionError("householder_from_linear needs a non-empty vector");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::VectorXd vv(n);
  for (Eigen::Index i = 0; i < n; ++i) vv(i) = v[static_cast<std::size_t>(i)];
  const double len = vv.norm();
  if (!(len > 1e-12)) {
    throw DomainError("degenerate linear part: ||v|| = " + format_residual(len) + " <= 1e-12");
  }
  const Eigen::VectorXd vhat = vv / len;
  Eigen::MatrixXd u = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  w(0) = 1.0;
  if (vhat(0) > 0.9) {
    // Reflect e_1 to -vhat, then flip the sign of the first column.
    w += vhat;
    u -= (2.0 / w.squaredNorm()) * w * w.transpose();
    u.col(0) = -u.col(0);
  } else {
    w -= vhat;
    if (w.squaredNorm() > 0.0) u -= (2.0 / w.squaredNorm()) * w * w.transpose();
  }
  return OrthoMatrix(std::move(u), OrthoProvenance::Householder);
}

OrthoMatrix random_orthogonal(std::size_t d, std::uint64_t seed) {
  if (d == 0) throw DimensionError("random_orthogonal needs d >= 1");
  const auto n = static_cast<Eigen::Index>(d);
  Eigen::MatrixXd g(n, n);
  std::uint64_t counter = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = inverse_normal_cdf(counter_uniform(seed, counter++));
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return OrthoMatrix(std::move(q), OrthoProvenance::RandomQR);
}

CoeffMap apply_transform(const OrthoMatrix& u, const CoeffMap& coeffs, std::uint64_t max_degree,
                         int threads) {
  const std::size_t d = u.dim();
  if (coeffs.dim() != d) {
    throw DimensionError("apply_transform: matrix is " + std::to_string(d) + "x" + std::to_string(d) +
                         " but coefficients have dimension " + std::to_string(coeffs.dim()));
  }
  if (coeffs.size() > 0 && coeffs.max_degree() > max_degree) {
    throw DomainError("apply_transform: coefficients reach degree " +
                      std::to_string(coeffs.max_degree()) + " above the requested maximum " +
                      std::to_string(max_degree));
  }
  if (u.is_signed_permutation()) return apply_signed_permutation(u, coeffs);

  std::map<std::uint64_t, std::vector<std::pair<MultiIndex, double>>> blocks;
  for (const auto& [k, v] : coeffs.entries()) blocks[k.degree()].emplace_back(k, v);
  for (const auto& [m, block] : blocks) checked_power(d, m);

  CoeffMap::Storage out;
  for (const auto& [m, block] : blocks) transform_block(u.matrix(), d, m, block, out, threads);
  return CoeffMap(d, std::move(out), Provenance::Transformed);
}

CoeffMap apply_transform(const OrthoMatrix& u, const CoeffMap& coeffs) {
  return apply_transform(u, coeffs, coeffs.max_degree());
}

NormResult transformed_norm(const WeightSpec& spec, const OrthoMatrix& u, const CoeffMap& coeffs,
                            std::uint64_t max_degree) {
  return norm(spec, apply_transform(u, coeffs, max_degree));
}

J2Demo j2_matrix_demo(const OrthoMatrix& u, const std::array<double, 3>& input) {
  if (u.dim() != 2) throw DimensionError("j2_matrix_demo works in dimension 2");
  J2Demo demo;
  const double h = 1.0 / std::sqrt(2.0);
  demo.j2 << 1.0, 0.0, 0.0,
             0.0, h, 0.0,
             0.0, h, 0.0,
             0.0, 0.0, 1.0;
  demo.j2_adjoint = demo.j2.transpose();
  const Eigen::Matrix2d ut = u.matrix().transpose();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) demo.kron(2 * i + j, 2 * k + l) = ut(i, k) * ut(j, l);
      }
    }
  }
  const Eigen::Vector3d c(input[0], input[1], input[2]);
  demo.via_matrices = demo.j2_adjoint * demo.kron * demo.j2 * c;

  CoeffMap::Storage entries;
  entries.emplace(MultiIndex{2, 0}, input[0]);
  entries.emplace(MultiIndex{1, 1}, input[1]);
  entries.emplace(MultiIndex{0, 2}, input[2]);
  const auto out = apply_transform(u, CoeffMap(2, std::move(entries)), 2);
  demo.via_apply = Eigen::Vector3d(out.at(MultiIndex{2, 0}), out.at(MultiIndex{1, 1}),
                                   out.at(MultiIndex{0, 2}));
  demo.residual = (demo.via_matrices - demo.via_apply).cwiseAbs().maxCoeff();
  return demo;
}

std::string to_string(LinearSource s) {
  return s == LinearSource::Supplied ? "supplied" : "quadrature";
}

RegressionTransform regression_transform(const CoeffMap& coeffs) {
  std::vector<double> linear(coeffs.dim());
  for (std::size_t j = 0; j < coeffs.dim(); ++j) linear[j] = coeffs.at(MultiIndex::unit(coeffs.dim(), j));
  auto u = householder_from_linear(linear);
  return {std::move(u), std::move(linear), LinearSource::Supplied};
}

RegressionTransform regression_transform(const ScalarField& f, std::size_t d, std::size_t quad_order,
                                         int threads) {
  const auto coeffs = estimate_coeffs(f, d, 1, quad_order, threads);
  auto out = regression_transform(coeffs);
  out.source = LinearSource::Quadrature;
  return out;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::string out(csv::kVersionLine);
  out += '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += csv::format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

Eigen::MatrixXd matrix_from_csv(const std::string& text) {
  const auto rows = csv::parse_rows(text);
  if (rows.empty()) throw FormatError("matrix CSV has no rows");
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw FormatError("matrix CSV rows have inconsistent widths");
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = csv::parse_double(rows[i][j]);
    }
  }
  return m;
}

std::string to_csv(const OrthoMatrix& u) { return matrix_to_csv(u.matrix()); }
std::string to_csv(const ConstructionMatrix& m) { return matrix_to_csv(m.matrix()); }

OrthoMatrix ortho_matrix_from_csv(const std::string& text) {
  return OrthoMatrix(matrix_from_csv(text), OrthoProvenance::UserSupplied);
}

OrthoMatrix load_ortho_matrix(const std::string& path) {
  return ortho_matrix_from_csv(csv::read_file(path));
}

}  // namespace hqmc
