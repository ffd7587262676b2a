#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "lexclust/clustering.hpp"
#include "lexclust/error.hpp"
#include "lexclust/kmeans.hpp"
#include "lexclust/matrix.hpp"

/**
 * @file spectral.hpp
 * @brief Graph operators on an affinity matrix, the top-eigenpair contract,
 * the NJW and Modified Ncut clusterers, and the Ncut/Nassoc measures.
 */

namespace lexclust {

/// Eigenpairs sorted by descending eigenvalue; `vectors` holds them as unit columns.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Flips `v` so that its largest-magnitude component (first one on ties) is positive.
inline void fix_sign(Eigen::Ref<Vector> v) {
  Eigen::Index arg = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best) {
      best = std::abs(v[i]);
      arg = i;
    }
  }
  if (v[arg] < 0.0) v = -v;
}

/**
 * @brief The k largest algebraic eigenpairs of a symmetric matrix.
 *
 * Every returned pair satisfies |M x - l x| <= tol * max(1, |M|_F) with |x| = 1,
 * and every vector is sign-fixed with `fix_sign`.
 */
inline EigenPairs top_eigenpairs(const Matrix& m, std::size_t k, double tol = 1e-10) {
  const auto n = m.rows();
  if (m.cols() != n) throw Error("eigensolver needs a square matrix");
  if (k == 0 || static_cast<Eigen::Index>(k) > n) {
    throw Error("requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) + "x" + std::to_string(n) +
                " matrix");
  }
  const double scale = std::max(1.0, m.norm());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw Error("eigensolver needs a symmetric matrix");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("symmetric eigensolver did not converge", std::numeric_limits<double>::infinity());
  }
  // Eigen returns ascending order.
  EigenPairs out;
  const auto kk = static_cast<Eigen::Index>(k);
  out.values.resize(kk);
  out.vectors.resize(n, kk);
  for (Eigen::Index c = 0; c < kk; ++c) {
    out.values[c] = solver.eigenvalues()[n - 1 - c];
    out.vectors.col(c) = solver.eigenvectors().col(n - 1 - c);
    fix_sign(out.vectors.col(c));
  }

  double worst = 0.0;
  for (Eigen::Index c = 0; c < kk; ++c) {
    worst = std::max(worst, (m * out.vectors.col(c) - out.values[c] * out.vectors.col(c)).norm());
  }
  if (worst > tol * scale) throw ConvergenceError("eigenpair residual above tolerance", worst);
  return out;
}

/// Checks the affinity-matrix invariants: square, symmetric, finite, nonnegative, zero diagonal.
inline void validate_affinity(const Matrix& a) {
  if (a.rows() != a.cols()) throw Error("affinity matrix must be square");
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw Error("affinity diagonal must be zero (row " + std::to_string(i) + ")");
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double v = a(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error("affinity entry (" + std::to_string(i) + ", " + std::to_string(j) + ") is negative or not finite");
      }
      if (std::abs(v - a(j, i)) > 1e-12 * std::max(1.0, std::abs(v))) {
        throw Error("affinity matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
      }
    }
  }
}

/// Row sums of the affinity matrix; throws DisconnectedVertexError on a zero row.
inline Vector degree(const Matrix& a) {
  Vector d = a.rowwise().sum();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 0.0)) throw DisconnectedVertexError(static_cast<std::size_t>(i));
  }
  return d;
}

/// D^{-1/2} A D^{-1/2}.
inline Matrix normalized_laplacian(const Matrix& a, const Vector& d) {
  const Vector s = d.cwiseSqrt().cwiseInverse();
  Matrix l = s.asDiagonal() * a * s.asDiagonal();
  // Exact symmetry regardless of rounding order.
  return 0.5 * (l + l.transpose());
}

/// D^{-1} A; row-stochastic.
inline Matrix random_walk_matrix(const Matrix& a, const Vector& d) { return d.cwiseInverse().asDiagonal() * a; }

struct SpectralOptions {
  std::size_t restarts = 10;
  double eigen_tol = 1e-10;
};

struct SpectralResult {
  Clustering clustering;
  /// One row per item: the space K-means ran in (Y for NJW, X for Modified Ncut).
  RowMatrix embedding;
  /// Eigenvalues of the vectors stacked into the embedding, descending.
  Vector eigenvalues;
  double kmeans_objective = 0.0;
  /// Items whose eigenvector row was all zero and was replaced by e1 (NJW only).
  std::vector<std::size_t> zero_rows;
};

namespace detail {

inline SpectralResult finish_with_kmeans(RowMatrix embedding, Vector eigenvalues, std::size_t k, std::uint64_t seed,
                                         const SpectralOptions& options, const char* method) {
  KMeansOptions ko;
  ko.restarts = options.restarts;
  auto km = kmeans(embedding, k, seed, ko);
  SpectralResult r;
  r.clustering = std::move(km.clustering);
  r.clustering.method = method;
  r.kmeans_objective = km.objective;
  r.embedding = std::move(embedding);
  r.eigenvalues = std::move(eigenvalues);
  return r;
}

inline void check_cluster_count(const Matrix& a, std::size_t k) {
  if (k < 2 || static_cast<Eigen::Index>(k) > a.rows()) {
    throw Error("cluster count k=" + std::to_string(k) + " must lie in [2, " + std::to_string(a.rows()) + "]");
  }
}

}  // namespace detail

/**
 * NJW: top-k eigenvectors of D^{-1/2} A D^{-1/2} as columns, rows scaled to
 * unit length, K-means on the rows.
 */
inline SpectralResult njw_cluster(const Matrix& a, std::size_t k, std::uint64_t seed,
                                  const SpectralOptions& options = {}) {
  validate_affinity(a);
  detail::check_cluster_count(a, k);
  const Vector d = degree(a);
  const auto pairs = top_eigenpairs(normalized_laplacian(a, d), k, options.eigen_tol);

  RowMatrix y = pairs.vectors;
  std::vector<std::size_t> zero_rows;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    const double norm = y.row(i).norm();
    if (norm > 0.0) {
      y.row(i) /= norm;
    } else {
      y.row(i).setZero();
      y(i, 0) = 1.0;
      zero_rows.push_back(static_cast<std::size_t>(i));
    }
  }
  auto r = detail::finish_with_kmeans(std::move(y), pairs.values, k, seed, options, "spectral-njw");
  r.zero_rows = std::move(zero_rows);
  return r;
}

/**
 * @brief Modified Ncut: eigenvectors 2..k of P = D^{-1} A, K-means on their rows.
 *
 * P is similar to L = D^{-1/2} A D^{-1/2}, and x_P = D^{-1/2} x_L. L always has
 * the eigenpair (1, D^{1/2} 1), which is the discarded leading vector; it is
 * deflated out of L before solving so that the choice does not depend on how
 * the solver splits a repeated eigenvalue 1 (disconnected graphs).
 */
inline SpectralResult modified_ncut_cluster(const Matrix& a, std::size_t k, std::uint64_t seed,
                                            const SpectralOptions& options = {}) {
  validate_affinity(a);
  detail::check_cluster_count(a, k);
  const Vector d = degree(a);
  Matrix l = normalized_laplacian(a, d);
  const Vector lead = d.cwiseSqrt().normalized();
  // Spectrum of L lies in [-1, 1]; sending the leading vector to -2 puts it last.
  l -= 3.0 * lead * lead.transpose();
  l = 0.5 * (l + l.transpose());
  const auto pairs = top_eigenpairs(l, k - 1, options.eigen_tol);

  const Vector inv_sqrt_d = d.cwiseSqrt().cwiseInverse();
  RowMatrix x(a.rows(), static_cast<Eigen::Index>(k - 1));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    Vector col = inv_sqrt_d.cwiseProduct(pairs.vectors.col(c));
    fix_sign(col);
    x.col(c) = col;
  }
  return detail::finish_with_kmeans(std::move(x), pairs.values, k, seed, options, "spectral-ncut");
}

struct CutMeasures {
  double ncut = 0.0;
  double nassoc = 0.0;
};

/// Ncut and Nassoc of the bipartition (side[i] true -> first set).
inline CutMeasures ncut_measure(const Matrix& a, std::span<const bool> side) {
  if (static_cast<Eigen::Index>(side.size()) != a.rows()) throw Error("partition size does not match the graph");
  double w_aa = 0.0, w_bb = 0.0, w_ab = 0.0;
  std::size_t n_a = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const bool si = side[static_cast<std::size_t>(i)];
    n_a += si;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const bool sj = side[static_cast<std::size_t>(j)];
      const double w = a(i, j);
      if (si && sj) {
        w_aa += w;
      } else if (!si && !sj) {
        w_bb += w;
      } else if (si) {
        w_ab += w;
      }
    }
  }
  if (n_a == 0 || n_a == side.size()) throw Error("both sides of the partition must be nonempty");
  const double vol_a = w_aa + w_ab;
  const double vol_b = w_bb + w_ab;
  if (!(vol_a > 0.0) || !(vol_b > 0.0)) throw Error("a side of the partition has zero volume");
  return {w_ab / vol_a + w_ab / vol_b, w_aa / vol_a + w_bb / vol_b};
}

}  // namespace lexclust
