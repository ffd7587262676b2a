#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lexclust/clustering.hpp"
#include "lexclust/context.hpp"
#include "lexclust/error.hpp"
#include "lexclust/matrix.hpp"

/**
 * @file metrics.hpp
 * @brief Clustering comparison, silhouette diagnostics and oracle analysis.
 *
 * Entropies and information are in nats.
 */

namespace lexclust {

/// VI(c1, c2) = H(c1) + H(c2) - 2 I(c1; c2), from the joint contingency table.
inline double variation_of_information(std::span<const std::size_t> c1, std::span<const std::size_t> c2) {
  if (c1.size() != c2.size()) {
    throw Error("cannot compare clusterings of " + std::to_string(c1.size()) + " and " + std::to_string(c2.size()) +
                " items");
  }
  if (c1.empty()) return 0.0;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> m1, m2;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    joint[{c1[i], c2[i]}] += 1.0;
    m1[c1[i]] += 1.0;
    m2[c2[i]] += 1.0;
  }
  // Written as a sum of nonnegative terms: -p_ij (log(p_ij/p_i) + log(p_ij/p_j)).
  const double n = static_cast<double>(c1.size());
  double vi = 0.0;
  for (const auto& [cell, nij] : joint) {
    vi -= nij / n * (std::log(nij / m1[cell.first]) + std::log(nij / m2[cell.second]));
  }
  return std::max(0.0, vi);
}

inline double variation_of_information(const Clustering& c1, const Clustering& c2) {
  return variation_of_information(c1.assignment, c2.assignment);
}

/// VI / log(n); lies in [0, 1] because VI never exceeds log(n).
inline double normalized_vi(std::span<const std::size_t> c1, std::span<const std::size_t> c2) {
  if (c1.size() < 2) throw Error("normalized VI needs at least two items");
  return variation_of_information(c1, c2) / std::log(static_cast<double>(c1.size()));
}

inline double normalized_vi(const Clustering& c1, const Clustering& c2) {
  return normalized_vi(c1.assignment, c2.assignment);
}

struct SilhouetteResult {
  std::vector<double> scores;
  double mean = 0.0;
};

/**
 * Euclidean silhouette. A point alone in its cluster scores 0. Clusters with no
 * members are ignored; at least two nonempty clusters are required.
 */
inline SilhouetteResult silhouette(const RowMatrix& points, std::span<const std::size_t> assignment) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (assignment.size() != n) throw Error("assignment size does not match the points");
  std::size_t k = 0;
  for (auto c : assignment) k = std::max(k, c + 1);
  std::vector<std::size_t> sizes(k, 0);
  for (auto c : assignment) ++sizes[c];
  if (std::count_if(sizes.begin(), sizes.end(), [](std::size_t s) { return s > 0; }) < 2) {
    throw Error("silhouette needs at least two nonempty clusters");
  }

  SilhouetteResult r;
  r.scores.resize(n);
  std::vector<double> sum(k);
  for (std::size_t p = 0; p < n; ++p) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t q = 0; q < n; ++q) {
      if (q != p) {
        sum[assignment[q]] += (points.row(static_cast<Eigen::Index>(p)) - points.row(static_cast<Eigen::Index>(q))).norm();
      }
    }
    const auto own = assignment[p];
    if (sizes[own] == 1) {
      r.scores[p] = 0.0;
      continue;
    }
    const double a = sum[own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own && sizes[c] > 0) b = std::min(b, sum[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    r.scores[p] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : r.scores) total += s;
  r.mean = total / static_cast<double>(n);
  return r;
}

inline SilhouetteResult silhouette(const RowMatrix& points, const Clustering& c) {
  return silhouette(points, c.assignment);
}

/// Per-sample scores of two systems on the same samples.
struct ScoreTable {
  std::vector<std::string> ids;
  std::vector<double> model1;
  std::vector<double> model2;
  bool higher_is_better = true;

  std::size_t size() const noexcept { return ids.size(); }
};

struct OracleReport {
  /// Mean of the per-sample better score.
  double oracle_mean = 0.0;
  double model1_mean = 0.0;
  double model2_mean = 0.0;
  /// Fractions of samples with equal scores / model 1 strictly better / model 2 strictly better.
  double agree_fraction = 0.0;
  double model1_better_fraction = 0.0;
  double model2_better_fraction = 0.0;
};

/// For each sample keeps the better of the two scores.
inline OracleReport oracle_analysis(const ScoreTable& t) {
  const auto n = t.size();
  if (n == 0) throw Error("score table is empty");
  if (t.model1.size() != n || t.model2.size() != n) throw Error("score table columns differ in length");
  OracleReport r;
  std::size_t agree = 0, first = 0, second = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s1 = t.model1[i];
    const double s2 = t.model2[i];
    if (!std::isfinite(s1) || !std::isfinite(s2)) throw Error("non-finite score for sample '" + t.ids[i] + "'");
    r.model1_mean += s1;
    r.model2_mean += s2;
    r.oracle_mean += t.higher_is_better ? std::max(s1, s2) : std::min(s1, s2);
    if (s1 == s2) {
      ++agree;
    } else if ((s1 > s2) == t.higher_is_better) {
      ++first;
    } else {
      ++second;
    }
  }
  const double dn = static_cast<double>(n);
  r.oracle_mean /= dn;
  r.model1_mean /= dn;
  r.model2_mean /= dn;
  r.agree_fraction = static_cast<double>(agree) / dn;
  r.model1_better_fraction = static_cast<double>(first) / dn;
  r.model2_better_fraction = static_cast<double>(second) / dn;
  return r;
}

// Score file: "#higher_is_better={true|false}" header, then
// sample_id<TAB>score_model1<TAB>score_model2 rows.

inline void write_score_table(std::ostream& out, const ScoreTable& t) {
  out << "#higher_is_better=" << (t.higher_is_better ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t.ids[i] << '\t' << detail::format_double(t.model1[i]) << '\t' << detail::format_double(t.model2[i]) << '\n';
  }
}

inline ScoreTable read_score_table(std::istream& in) {
  ScoreTable t;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line == "#higher_is_better=true") {
        t.higher_is_better = true;
      } else if (line == "#higher_is_better=false") {
        t.higher_is_better = false;
      } else {
        throw ParseError("expected #higher_is_better={true|false}", lineno);
      }
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream s(line);
    std::string field;
    while (std::getline(s, field, '\t')) f.push_back(field);
    if (f.size() != 3) throw ParseError("expected sample_id<TAB>score_model1<TAB>score_model2", lineno);
    double v[2];
    for (int i = 0; i < 2; ++i) {
      char* end = nullptr;
      v[i] = std::strtod(f[static_cast<std::size_t>(i + 1)].c_str(), &end);
      if (f[static_cast<std::size_t>(i + 1)].empty() || *end != '\0' || !std::isfinite(v[i])) {
        throw ParseError("bad score '" + f[static_cast<std::size_t>(i + 1)] + "'", lineno);
      }
    }
    t.ids.push_back(f[0]);
    t.model1.push_back(v[0]);
    t.model2.push_back(v[1]);
  }
  if (!header) throw ParseError("missing #higher_is_better header", 1);
  return t;
}

struct ComparisonReport {
  double vi = 0.0;
  double nvi = 0.0;
  std::optional<OracleReport> oracle;
};

inline ComparisonReport compare_clusterings(const Clustering& c1, const Clustering& c2,
                                            const ScoreTable* scores = nullptr) {
  ComparisonReport r;
  r.vi = variation_of_information(c1, c2);
  r.nvi = normalized_vi(c1, c2);
  if (scores) r.oracle = oracle_analysis(*scores);
  return r;
}

/// Plain key=value lines.
inline void write_comparison_report(std::ostream& out, const ComparisonReport& r) {
  out << "vi=" << detail::format_double(r.vi) << '\n';
  out << "nvi=" << detail::format_double(r.nvi) << '\n';
  out << "nvi_normalizer=log(n)\n";
  if (r.oracle) {
    out << "oracle_mean=" << detail::format_double(r.oracle->oracle_mean) << '\n';
    out << "m1_mean=" << detail::format_double(r.oracle->model1_mean) << '\n';
    out << "m2_mean=" << detail::format_double(r.oracle->model2_mean) << '\n';
    out << "agree=" << detail::format_double(r.oracle->agree_fraction) << '\n';
    out << "m1_better=" << detail::format_double(r.oracle->model1_better_fraction) << '\n';
    out << "m2_better=" << detail::format_double(r.oracle->model2_better_fraction) << '\n';
  }
}

}  // namespace lexclust
