#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lexclust/context.hpp"
#include "lexclust/error.hpp"
#include "lexclust/matrix.hpp"

namespace lexclust {

/// Hard assignment of items to cluster ids in [0, k).
struct Clustering {
  std::vector<std::size_t> assignment;
  std::size_t k = 0;
  /// k rows in the space the final K-means ran in, when there is one.
  std::optional<RowMatrix> centers;
  /// Provenance tag: "kmeans", "spectral-njw", "spectral-ncut", "brown".
  std::string method;

  std::size_t size() const noexcept { return assignment.size(); }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(k, 0);
    for (auto c : assignment) ++s[c];
    return s;
  }

  std::vector<std::size_t> empty_clusters() const {
    std::vector<std::size_t> out;
    const auto s = sizes();
    for (std::size_t c = 0; c < k; ++c) {
      if (s[c] == 0) out.push_back(c);
    }
    return out;
  }
};

inline Clustering make_clustering(std::vector<std::size_t> assignment, std::size_t k, std::string method) {
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= k) {
      throw Error("item " + std::to_string(i) + " has cluster id " + std::to_string(assignment[i]) +
                  " outside [0, " + std::to_string(k) + ")");
    }
  }
  return Clustering{std::move(assignment), k, std::nullopt, std::move(method)};
}

/// Ordered key=value pairs recorded in a cluster file's header line.
using Metadata = std::vector<std::pair<std::string, std::string>>;

inline std::string metadata_value(const Metadata& meta, const std::string& key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

// Cluster file: "# method=<m> k=<k> key=value..." header, then one
// word<TAB>cluster_id row per lexicon entry in lexicon order.

inline void write_cluster_file(std::ostream& out, const Clustering& c, std::span<const std::string> words,
                               const Metadata& extra = {}) {
  if (words.size() != c.size()) throw Error("cluster file needs one word per item");
  out << "# method=" << c.method << " k=" << c.k;
  for (const auto& [k, v] : extra) out << ' ' << k << '=' << v;
  out << '\n';
  for (std::size_t i = 0; i < words.size(); ++i) out << words[i] << '\t' << c.assignment[i] << '\n';
}

struct ClusterFile {
  std::vector<std::string> words;
  Clustering clustering;
  Metadata metadata;
};

inline ClusterFile read_cluster_file(std::istream& in) {
  ClusterFile f;
  std::string line;
  std::size_t lineno = 0;
  std::optional<std::size_t> k;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string kv;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        f.metadata.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("expected word<TAB>cluster_id", lineno);
    try {
      std::size_t used = 0;
      const auto id_text = line.substr(tab + 1);
      const auto id = std::stoull(id_text, &used);
      if (used != id_text.size()) throw ParseError("bad cluster id", lineno);
      f.words.push_back(line.substr(0, tab));
      f.clustering.assignment.push_back(id);
    } catch (const std::logic_error&) {
      throw ParseError("bad cluster id", lineno);
    }
  }
  f.clustering.method = metadata_value(f.metadata, "method");
  const auto k_text = metadata_value(f.metadata, "k");
  std::size_t max_id = 0;
  for (auto c : f.clustering.assignment) max_id = std::max(max_id, c + 1);
  if (!k_text.empty()) {
    try {
      k = std::stoull(k_text);
    } catch (const std::logic_error&) {
      throw ParseError("bad k in header", 1);
    }
    if (*k < max_id) throw ParseError("cluster id exceeds k=" + k_text, 0);
  }
  f.clustering.k = k.value_or(max_id);
  return f;
}

// Embedding dump: word<TAB>v1<TAB>...<TAB>vd per item, then one
// "#CENTER<TAB>cluster_id<TAB>v1..." row per cluster center.

inline void write_embedding_dump(std::ostream& out, const RowMatrix& embedding, const RowMatrix& centers,
                                 std::span<const std::string> words) {
  if (static_cast<std::size_t>(embedding.rows()) != words.size()) throw Error("embedding dump needs one word per row");
  for (Eigen::Index i = 0; i < embedding.rows(); ++i) {
    out << words[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < embedding.cols(); ++j) out << '\t' << detail::format_double(embedding(i, j));
    out << '\n';
  }
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    out << "#CENTER\t" << c;
    for (Eigen::Index j = 0; j < centers.cols(); ++j) out << '\t' << detail::format_double(centers(c, j));
    out << '\n';
  }
}

struct EmbeddingDump {
  std::vector<std::string> words;
  RowMatrix embedding;
  RowMatrix centers;
};

inline EmbeddingDump read_embedding_dump(std::istream& in) {
  std::vector<std::vector<double>> rows, centers;
  EmbeddingDump d;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  bool have_dim = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream s(line);
    std::string f;
    while (std::getline(s, f, '\t')) fields.push_back(f);
    const bool center = fields[0] == "#CENTER";
    const std::size_t first = center ? 2 : 1;
    if (fields.size() < first) throw ParseError("short row", lineno);
    std::vector<double> v;
    for (std::size_t i = first; i < fields.size(); ++i) {
      char* end = nullptr;
      v.push_back(std::strtod(fields[i].c_str(), &end));
      if (end != fields[i].c_str() + fields[i].size()) throw ParseError("bad number '" + fields[i] + "'", lineno);
    }
    if (!have_dim) {
      dim = v.size();
      have_dim = true;
    }
    if (v.size() != dim) throw ParseError("inconsistent dimension", lineno);
    if (center) {
      centers.push_back(std::move(v));
    } else {
      d.words.push_back(fields[0]);
      rows.push_back(std::move(v));
    }
  }
  auto pack = [dim](const std::vector<std::vector<double>>& src) {
    RowMatrix m(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < src.size(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[i][j];
    }
    return m;
  };
  d.embedding = pack(rows);
  d.centers = pack(centers);
  return d;
}

}  // namespace lexclust
