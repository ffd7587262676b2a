#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexclust/corpus.hpp"
#include "lexclust/error.hpp"
#include "lexclust/matrix.hpp"

/**
 * @file context.hpp
 * @brief Window-based count representation of lexicon words, and loading of
 * pre-trained embeddings as an alternative representation.
 */

namespace lexclust {

enum class RepresentationKind { count, embedding };

inline const char* to_string(RepresentationKind k) { return k == RepresentationKind::count ? "count" : "embedding"; }

/// Lexicon indices of the descriptor words, frequency-descending.
struct DescriptorSet {
  std::vector<std::size_t> words;

  std::size_t size() const noexcept { return words.size(); }
};

/**
 * @brief One row per lexicon word.
 *
 * For the count kind built from a single window size W, column j < M counts
 * occurrences of the row's word within W tokens to the right of descriptor j,
 * and column M + j the same on the left. Concatenated matrices list one
 * window per block in `windows`; embeddings leave it empty.
 */
struct ContextMatrix {
  RowMatrix rows;
  std::vector<std::size_t> windows;
  RepresentationKind kind = RepresentationKind::count;

  std::size_t size() const noexcept { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(rows.cols()); }
};

inline DescriptorSet select_descriptors(const Lexicon& lexicon, std::size_t m) {
  const std::size_t max_m = lexicon.size() - 1;
  if (m == 0 || m > max_m) {
    throw Error("descriptor count M=" + std::to_string(m) + " is infeasible; this lexicon allows at most M=" +
                std::to_string(max_m));
  }
  DescriptorSet d;
  d.words.resize(m);
  // Non-RARE entries are already in rank order.
  for (std::size_t i = 0; i < m; ++i) d.words[i] = i;
  return d;
}

namespace detail {

inline std::vector<std::int64_t> descriptor_columns(std::size_t lexicon_size, const DescriptorSet& descriptors) {
  std::vector<std::int64_t> column(lexicon_size, -1);
  for (std::size_t j = 0; j < descriptors.size(); ++j) {
    const auto w = descriptors.words[j];
    if (w >= lexicon_size) throw Error("descriptor index out of lexicon range");
    column[w] = static_cast<std::int64_t>(j);
  }
  return column;
}

}  // namespace detail

/// Adds the window counts of `sentences` into `counts` (N x 2M). Partial
/// matrices over disjoint sentence ranges sum to the full matrix.
inline void accumulate_context_counts(std::span<const IndexedSentence> sentences, const DescriptorSet& descriptors,
                                      std::size_t window, RowMatrix& counts) {
  const auto n = static_cast<std::size_t>(counts.rows());
  const auto m = descriptors.size();
  if (static_cast<std::size_t>(counts.cols()) != 2 * m) throw Error("count matrix has wrong width");
  const auto column = detail::descriptor_columns(n, descriptors);

  for (const auto& s : sentences) {
    const std::size_t len = s.size();
    for (std::size_t p = 0; p < len; ++p) {
      const auto j = column[s[p]];
      if (j < 0) continue;
      const std::size_t hi = std::min(len, p + window + 1);
      for (std::size_t q = p + 1; q < hi; ++q) counts(s[q], j) += 1.0;
      const std::size_t lo = p > window ? p - window : 0;
      for (std::size_t q = lo; q < p; ++q) counts(s[q], static_cast<std::int64_t>(m) + j) += 1.0;
    }
  }
}

inline ContextMatrix build_context_matrix(std::span<const IndexedSentence> sentences, std::size_t lexicon_size,
                                          const DescriptorSet& descriptors, std::size_t window) {
  if (window == 0) throw Error("window size W must be at least 1");
  ContextMatrix c;
  c.kind = RepresentationKind::count;
  c.windows = {window};
  c.rows = RowMatrix::Zero(static_cast<Eigen::Index>(lexicon_size), static_cast<Eigen::Index>(2 * descriptors.size()));
  accumulate_context_counts(sentences, descriptors, window, c.rows);
  return c;
}

inline ContextMatrix build_context_matrix(std::span<const Sentence> sentences, const Lexicon& lexicon,
                                          const DescriptorSet& descriptors, std::size_t window) {
  const auto indexed = index_corpus(sentences, lexicon);
  return build_context_matrix(indexed, lexicon.size(), descriptors, window);
}

/// Feature-wise concatenation of count matrices sharing the same row order.
inline ContextMatrix concat_context_matrices(std::span<const ContextMatrix> parts) {
  if (parts.empty()) throw Error("nothing to concatenate");
  const auto rows = parts.front().rows.rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    if (p.kind != RepresentationKind::count) throw Error("only count matrices can be concatenated");
    if (p.rows.rows() != rows) {
      throw Error("cannot concatenate matrices with " + std::to_string(rows) + " and " +
                  std::to_string(p.rows.rows()) + " rows");
    }
    cols += p.rows.cols();
  }
  ContextMatrix out;
  out.kind = RepresentationKind::count;
  out.rows.resize(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.rows.middleCols(at, p.rows.cols()) = p.rows;
    at += p.rows.cols();
    out.windows.insert(out.windows.end(), p.windows.begin(), p.windows.end());
  }
  return out;
}

struct EmbeddingLoad {
  ContextMatrix matrix;
  /// Lexicon words absent from the vector file; their rows are all zero.
  std::vector<std::string> missing;
};

/**
 * Reads `word v1 ... vd` lines (space separated) and aligns them to lexicon
 * order. A leading "count dim" header line, as written by word2vec, is
 * skipped. Words outside the lexicon are ignored; the first occurrence of a
 * duplicated word wins.
 */
inline EmbeddingLoad load_embedding_matrix(std::istream& in, const Lexicon& lexicon) {
  std::vector<std::vector<double>> found(lexicon.size());
  std::vector<bool> have(lexicon.size(), false);
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      char* end = nullptr;
      const double v = std::strtod(tok.c_str(), &end);
      if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
        throw ParseError("malformed vector component '" + tok + "'", lineno);
      }
      values.push_back(v);
    }
    if (lineno == 1 && values.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos &&
        values[0] == std::floor(values[0])) {
      continue;  // word2vec header
    }
    if (values.empty()) throw ParseError("word '" + word + "' has no vector components", lineno);
    if (dim == 0) dim = values.size();
    if (values.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " components, found " + std::to_string(values.size()),
                       lineno);
    }
    const auto idx = lexicon.index_of(word);
    if (idx == lexicon.rare_index() && word != kRareToken) continue;
    if (!have[idx]) {
      have[idx] = true;
      found[idx] = std::move(values);
    }
  }
  if (dim == 0) throw ParseError("embedding file contains no vectors", 0);

  EmbeddingLoad out;
  out.matrix.kind = RepresentationKind::embedding;
  out.matrix.rows = RowMatrix::Zero(static_cast<Eigen::Index>(lexicon.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    if (!have[i]) {
      out.missing.push_back(lexicon.word(i));
      continue;
    }
    for (std::size_t d = 0; d < dim; ++d) out.matrix.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = found[i][d];
  }
  return out;
}

namespace detail {

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline std::string join_windows(const std::vector<std::size_t>& windows) {
  if (windows.empty()) return "0";
  std::string s;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(windows[i]);
  }
  return s;
}

}  // namespace detail

// Context matrix file: "N D W kind" header, then N rows of D space-separated
// numbers. W is a comma-separated window list ("0" for embeddings). Counts are
// written as integers, embeddings as round-trippable decimals.

inline void write_context_matrix(std::ostream& out, const ContextMatrix& c) {
  out << c.rows.rows() << ' ' << c.rows.cols() << ' ' << detail::join_windows(c.windows) << ' ' << to_string(c.kind)
      << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < c.rows.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < c.rows.cols(); ++j) {
      if (j) line += ' ';
      const double v = c.rows(i, j);
      line += c.kind == RepresentationKind::count ? std::to_string(static_cast<long long>(v)) : detail::format_double(v);
    }
    line += '\n';
    out << line;
  }
}

inline ContextMatrix read_context_matrix(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty context matrix file", 1);
  std::istringstream header(line);
  long long n = -1, d = -1;
  std::string windows, kind;
  if (!(header >> n >> d >> windows >> kind) || n < 0 || d < 0) throw ParseError("expected header 'N D W kind'", 1);

  ContextMatrix c;
  if (kind == "count") {
    c.kind = RepresentationKind::count;
  } else if (kind == "embedding") {
    c.kind = RepresentationKind::embedding;
  } else {
    throw ParseError("unknown matrix kind '" + kind + "'", 1);
  }
  if (windows != "0") {
    std::istringstream ws(windows);
    std::string w;
    while (std::getline(ws, w, ',')) {
      try {
        c.windows.push_back(std::stoull(w));
      } catch (const std::logic_error&) {
        throw ParseError("bad window list '" + windows + "'", 1);
      }
    }
  }
  c.rows.resize(n, d);
  for (long long i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("expected " + std::to_string(n) + " rows", static_cast<std::size_t>(i + 2));
    const char* p = line.c_str();
    for (long long j = 0; j < d; ++j) {
      char* end = nullptr;
      const double v = std::strtod(p, &end);
      if (end == p) throw ParseError("expected " + std::to_string(d) + " values", static_cast<std::size_t>(i + 2));
      c.rows(i, j) = v;
      p = end;
    }
    while (*p == ' ' || *p == '\t' || *p == '\r') ++p;
    if (*p != '\0') throw ParseError("trailing data after " + std::to_string(d) + " values", static_cast<std::size_t>(i + 2));
  }
  return c;
}

}  // namespace lexclust
