#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "lexclust/context.hpp"
#include "lexclust/error.hpp"
#include "lexclust/matrix.hpp"
#include "lexclust/parallel.hpp"

/**
 * @file affinity.hpp
 * @brief Pairwise affinities between representation rows.
 *
 * Divergences use the natural logarithm throughout.
 */

namespace lexclust {

enum class Kernel {
  /// exp(-d / sigma) with d the symmetrized skew divergence.
  skew_similarity,
  /// The symmetrized skew divergence itself, used as the edge weight.
  skew_raw,
  /// exp(-|x - y|^2 / (2 sigma^2)).
  gaussian,
};

inline const char* to_string(Kernel k) {
  switch (k) {
    case Kernel::skew_similarity: return "skew";
    case Kernel::skew_raw: return "skew-raw";
    case Kernel::gaussian: return "gaussian";
  }
  return "?";
}

inline Kernel parse_kernel(const std::string& name) {
  if (name == "skew") return Kernel::skew_similarity;
  if (name == "skew-raw") return Kernel::skew_raw;
  if (name == "gaussian") return Kernel::gaussian;
  throw Error("unknown kernel '" + name + "' (expected skew, skew-raw or gaussian)");
}

struct AffinityParams {
  Kernel kernel = Kernel::skew_similarity;
  /// Skew smoothing weight, strictly inside (0, 1).
  double a = 0.999;
  /// Kernel width; empty selects the median off-diagonal distance/divergence.
  std::optional<double> sigma;
};

/// Symmetric, nonnegative, zero-diagonal weights.
struct AffinityMatrix {
  Matrix values;
  Kernel kernel = Kernel::skew_similarity;
  double a = 0.999;
  double sigma = 1.0;
  /// Rows that were all zero and replaced by the uniform distribution.
  std::vector<std::size_t> degenerate_rows;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
};

struct Distribution {
  std::vector<double> p;
  /// Input was all zero; `p` is uniform.
  bool degenerate = false;
};

inline Distribution normalize_to_distribution(std::span<const double> v) {
  Distribution out;
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      throw Error("cannot normalize: entry " + std::to_string(i) + " is negative or not finite");
    }
    total += v[i];
  }
  if (v.empty()) throw Error("cannot normalize an empty vector");
  out.p.resize(v.size());
  if (total == 0.0) {
    std::fill(out.p.begin(), out.p.end(), 1.0 / static_cast<double>(v.size()));
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out.p[i] = v[i] / total;
  return out;
}

/// D_KL(p || q); zero-probability terms of p contribute nothing.
inline double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error("KL divergence of vectors with different dimensions");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw Error("KL divergence undefined: q[" + std::to_string(i) + "] = 0 where p > 0");
    sum += p[i] * std::log(p[i] / q[i]);
  }
  return sum;
}

namespace detail {

inline void check_smoothing(double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error("skew smoothing a must lie strictly inside (0, 1), got " + std::to_string(a));
}

// v'_i log(v'_i / (a v_i + (1-a) v'_i)) summed where v'_i > 0. The mixture is
// positive wherever v' is, so the sum is always finite.
inline double skew_term(double v, double vp, double a) {
  return vp > 0.0 ? vp * std::log(vp / (a * v + (1.0 - a) * vp)) : 0.0;
}

template <typename RowA, typename RowB>
double symmetrized_skew_rows(const RowA& v, const RowB& w, double a, Eigen::Index dim) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double x = v[i];
    const double y = w[i];
    if (x == y) continue;  // both directions vanish
    sum += skew_term(x, y, a) + skew_term(y, x, a);
  }
  // Clamp rounding noise; each direction is a KL divergence and nonnegative.
  return std::max(0.0, 0.5 * sum);
}

}  // namespace detail

/// D_KL(v' || a v + (1 - a) v').
inline double skew_divergence(std::span<const double> v, std::span<const double> v_prime, double a) {
  detail::check_smoothing(a);
  if (v.size() != v_prime.size()) throw Error("skew divergence of vectors with different dimensions");
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != v_prime[i]) sum += detail::skew_term(v[i], v_prime[i], a);
  }
  return std::max(0.0, sum);
}

inline double symmetrized_skew(std::span<const double> v, std::span<const double> v_prime, double a) {
  return 0.5 * (skew_divergence(v, v_prime, a) + skew_divergence(v_prime, v, a));
}

namespace detail {

inline double median_off_diagonal(const Matrix& d) {
  const auto n = d.rows();
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) vals.push_back(d(i, j));
  }
  if (vals.empty()) return 1.0;
  const auto mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid), vals.end());
  double med = vals[mid];
  if (vals.size() % 2 == 0) {
    med = 0.5 * (med + *std::max_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(mid)));
  }
  if (med > 0.0) return med;
  // Mostly duplicate rows: fall back to the mean positive value.
  double s = 0.0;
  std::size_t c = 0;
  for (double v : vals) {
    if (v > 0.0) {
      s += v;
      ++c;
    }
  }
  return c ? s / static_cast<double>(c) : 1.0;
}

}  // namespace detail

/**
 * @brief Builds the affinity matrix over the rows of `rows`.
 *
 * Skew kernels first normalize every row to a probability distribution (an
 * all-zero row becomes uniform and is listed in `degenerate_rows`). The
 * Gaussian kernel works on the raw rows. When `params.sigma` is empty the
 * median off-diagonal divergence (skew) or Euclidean distance (Gaussian) is
 * used.
 */
inline AffinityMatrix build_affinity(const RowMatrix& rows, const AffinityParams& params) {
  const auto n = rows.rows();
  const auto dim = rows.cols();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      if (!std::isfinite(rows(i, j))) {
        throw Error("non-finite value at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
    }
  }
  if (params.sigma && !(*params.sigma > 0.0 && std::isfinite(*params.sigma))) {
    throw Error("kernel width sigma must be positive");
  }

  AffinityMatrix out;
  out.kernel = params.kernel;
  out.a = params.a;
  Matrix dist = Matrix::Zero(n, n);

  if (params.kernel == Kernel::gaussian) {
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
      const auto i = static_cast<Eigen::Index>(ui);
      for (Eigen::Index j = i + 1; j < n; ++j) dist(i, j) = (rows.row(i) - rows.row(j)).squaredNorm();
    });
  } else {
    detail::check_smoothing(params.a);
    RowMatrix prob(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto r = rows.row(i);
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (r[j] < 0.0) {
          throw Error("skew kernel needs nonnegative rows; row " + std::to_string(i) + ", column " +
                      std::to_string(j) + " is negative");
        }
      }
      const double total = r.sum();
      if (total == 0.0) {
        prob.row(i).setConstant(1.0 / static_cast<double>(dim));
        out.degenerate_rows.push_back(static_cast<std::size_t>(i));
      } else {
        prob.row(i) = r / total;
      }
    }
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t ui) {
      const auto i = static_cast<Eigen::Index>(ui);
      for (Eigen::Index j = i + 1; j < n; ++j) {
        dist(i, j) = detail::symmetrized_skew_rows(prob.row(i), prob.row(j), params.a, dim);
      }
    });
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) dist(j, i) = dist(i, j);
  }

  out.values = Matrix::Zero(n, n);
  if (params.kernel == Kernel::skew_raw) {
    out.sigma = 0.0;
    out.values = dist;
  } else if (params.kernel == Kernel::gaussian) {
    // Median heuristic on distances, not squared distances.
    out.sigma = params.sigma ? *params.sigma : detail::median_off_diagonal(dist.cwiseSqrt());
    const double denom = 2.0 * out.sigma * out.sigma;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) out.values(i, j) = std::exp(-dist(i, j) / denom);
      }
    }
  } else {
    out.sigma = params.sigma ? *params.sigma : detail::median_off_diagonal(dist);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        if (i != j) out.values(i, j) = std::exp(-dist(i, j) / out.sigma);
      }
    }
  }
  out.values.diagonal().setZero();
  return out;
}

inline AffinityMatrix build_affinity(const ContextMatrix& context, const AffinityParams& params) {
  return build_affinity(context.rows, params);
}

// Affinity dump: "N kernel a=<a>,sigma=<sigma>" header, then N rows.

inline void write_affinity(std::ostream& out, const AffinityMatrix& a) {
  out << a.size() << ' ' << to_string(a.kernel) << " a=" << detail::format_double(a.a)
      << ",sigma=" << detail::format_double(a.sigma) << '\n';
  for (Eigen::Index i = 0; i < a.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.values.cols(); ++j) {
      if (j) out << ' ';
      out << detail::format_double(a.values(i, j));
    }
    out << '\n';
  }
}

inline AffinityMatrix read_affinity(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty affinity file", 1);
  std::istringstream header(line);
  long long n = -1;
  std::string kernel, params;
  if (!(header >> n >> kernel >> params) || n < 0) throw ParseError("expected header 'N kernel params'", 1);
  AffinityMatrix a;
  try {
    a.kernel = parse_kernel(kernel);
  } catch (const Error& e) {
    throw ParseError(e.what(), 1);
  }
  if (std::sscanf(params.c_str(), "a=%lf,sigma=%lf", &a.a, &a.sigma) != 2) throw ParseError("bad parameter list", 1);
  a.values.resize(n, n);
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("missing row", static_cast<std::size_t>(i + 2));
    std::istringstream row(line);
    for (long long j = 0; j < n; ++j) {
      if (!(row >> a.values(i, j))) throw ParseError("short row", static_cast<std::size_t>(i + 2));
    }
  }
  return a;
}

}  // namespace lexclust
