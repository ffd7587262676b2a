#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "lexclust/clustering.hpp"
#include "lexclust/error.hpp"
#include "lexclust/matrix.hpp"
#include "lexclust/parallel.hpp"
#include "lexclust/random.hpp"

/**
 * @file kmeans.hpp
 * @brief Lloyd's algorithm with k-means++ seeding.
 *
 * Points are the rows of a `RowMatrix`; distances are squared Euclidean.
 */

namespace lexclust {

struct KMeansOptions {
  std::size_t max_iter = 300;
  /// Stop when the relative objective improvement of an iteration drops below this.
  double tol = 1e-9;
  std::size_t restarts = 10;
};

struct KMeansResult {
  Clustering clustering;
  /// Sum of squared distances of every point to its assigned center.
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t restarts_used = 0;
  /// Objective after the initial assignment and after every mean update.
  std::vector<double> objective_trace;
  /// Terminated at an assignment fixed point (as opposed to tol or max_iter).
  bool converged = false;

  const RowMatrix& centers() const { return *clustering.centers; }
};

inline std::size_t count_distinct_rows(const RowMatrix& points) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t b) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      const double x = points(static_cast<Eigen::Index>(a), j);
      const double y = points(static_cast<Eigen::Index>(b), j);
      if (x != y) return x < y;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  std::size_t distinct = n ? 1 : 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

inline double kmeans_objective(const RowMatrix& points, std::span<const std::size_t> assignment,
                               const RowMatrix& centers) {
  double obj = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    obj += (points.row(i) - centers.row(static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(i)]))).squaredNorm();
  }
  return obj;
}

namespace detail {

inline void check_k(const RowMatrix& points, std::size_t k) {
  if (k == 0) throw Error("k must be positive");
  if (points.rows() == 0) throw Error("no points to cluster");
  const auto distinct = count_distinct_rows(points);
  if (distinct < k) {
    throw Error("cannot form k=" + std::to_string(k) + " clusters from " + std::to_string(distinct) +
                " distinct points");
  }
}

/// Nearest center, lowest index on ties.
inline std::size_t nearest_center(const RowMatrix& points, Eigen::Index i, const RowMatrix& centers, double* dist2) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (points.row(i) - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

/// Returns true when any assignment changed.
inline bool assign_points(const RowMatrix& points, const RowMatrix& centers, std::vector<std::size_t>& assignment) {
  bool changed = false;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = nearest_center(points, i, centers, nullptr);
    auto& slot = assignment[static_cast<std::size_t>(i)];
    if (slot != c) {
      slot = c;
      changed = true;
    }
  }
  return changed;
}

inline void compute_means(const RowMatrix& points, const std::vector<std::size_t>& assignment, RowMatrix& centers,
                          std::vector<std::size_t>& sizes) {
  centers.setZero();
  std::fill(sizes.begin(), sizes.end(), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const auto c = assignment[static_cast<std::size_t>(i)];
    centers.row(static_cast<Eigen::Index>(c)) += points.row(i);
    ++sizes[c];
  }
  for (std::size_t c = 0; c < sizes.size(); ++c) {
    if (sizes[c]) centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(sizes[c]);
  }
}

/// Mean update. An empty cluster takes over the point farthest from its
/// current center, one empty cluster at a time.
inline void update_centers(const RowMatrix& points, std::vector<std::size_t>& assignment, RowMatrix& centers) {
  const auto k = static_cast<std::size_t>(centers.rows());
  std::vector<std::size_t> sizes(k);
  compute_means(points, assignment, centers, sizes);
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c]) continue;
    Eigen::Index far = 0;
    double far_d = -1.0;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      const auto own = assignment[static_cast<std::size_t>(i)];
      if (sizes[own] <= 1) continue;
      const double d = (points.row(i) - centers.row(static_cast<Eigen::Index>(own))).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    assignment[static_cast<std::size_t>(far)] = c;
    compute_means(points, assignment, centers, sizes);
  }
}

}  // namespace detail

/**
 * k-means++ seeding: the first center is a uniformly drawn point, every later
 * center is drawn with probability proportional to its squared distance to the
 * nearest center chosen so far. Deterministic for a given seed.
 */
inline RowMatrix kmeanspp_init(const RowMatrix& points, std::size_t k, std::uint64_t seed) {
  detail::check_k(points, k);
  const auto n = points.rows();
  Rng rng(seed);
  RowMatrix centers(static_cast<Eigen::Index>(k), points.cols());
  centers.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centers.row(0)).squaredNorm();

  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d : d2) total += d;
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Eigen::Index pick = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = d2[static_cast<std::size_t>(i)];
      if (w <= 0.0) continue;
      acc += w;
      pick = i;
      if (acc > target) break;
    }
    // pick >= 0 because there are at least k distinct points.
    centers.row(static_cast<Eigen::Index>(c)) = points.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto& d = d2[static_cast<std::size_t>(i)];
      d = std::min(d, (points.row(i) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }
  return centers;
}

/**
 * Lloyd iterations from the given centers. Stops at an assignment fixed
 * point, when an iteration improves the objective by less than `tol`
 * (relative), or after `max_iter` mean updates.
 */
inline KMeansResult lloyd_iterate(const RowMatrix& points, RowMatrix centers, std::size_t max_iter = 300,
                                  double tol = 1e-9) {
  if (centers.rows() == 0 || centers.cols() != points.cols()) throw Error("centers do not match the points");
  const auto k = static_cast<std::size_t>(centers.rows());
  std::vector<std::size_t> assignment(static_cast<std::size_t>(points.rows()), 0);
  detail::assign_points(points, centers, assignment);

  KMeansResult r;
  double prev = kmeans_objective(points, assignment, centers);
  r.objective_trace.push_back(prev);
  for (std::size_t it = 0; it < max_iter; ++it) {
    detail::update_centers(points, assignment, centers);
    const double obj = kmeans_objective(points, assignment, centers);
    r.objective_trace.push_back(obj);
    ++r.iterations;
    if (!detail::assign_points(points, centers, assignment)) {
      r.converged = true;
      break;
    }
    if (prev - obj <= tol * prev) break;
    prev = obj;
  }
  r.objective = kmeans_objective(points, assignment, centers);
  r.restarts_used = 1;
  r.clustering = make_clustering(std::move(assignment), k, "kmeans");
  r.clustering.centers = std::move(centers);
  return r;
}

/// Best of `options.restarts` independent seedings; restart r uses
/// `derive_seed(seed, r)`. Ties in objective keep the earliest restart.
inline KMeansResult kmeans(const RowMatrix& points, std::size_t k, std::uint64_t seed,
                           const KMeansOptions& options = {}) {
  detail::check_k(points, k);
  const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
  std::vector<KMeansResult> runs(restarts);
  parallel_for(restarts, [&](std::size_t r) {
    runs[r] = lloyd_iterate(points, kmeanspp_init(points, k, derive_seed(seed, r)), options.max_iter, options.tol);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < restarts; ++r) {
    if (runs[r].objective < runs[best].objective) best = r;
  }
  KMeansResult out = std::move(runs[best]);
  out.restarts_used = restarts;
  return out;
}

}  // namespace lexclust
