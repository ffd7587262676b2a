#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lexclust/affinity.hpp"
#include "lexclust/brown.hpp"
#include "lexclust/clustering.hpp"
#include "lexclust/context.hpp"
#include "lexclust/corpus.hpp"
#include "lexclust/error.hpp"
#include "lexclust/kmeans.hpp"
#include "lexclust/metrics.hpp"
#include "lexclust/spectral.hpp"

/**
 * @file pipeline.hpp
 * @brief File-to-file pipeline stages behind the command-line tool.
 *
 * Each stage reads its inputs from files and writes its outputs to files, so
 * representations can be reused across clustering methods.
 */

namespace lexclust {

/// Settings shared by all stages. Defaults follow the full-scale setup
/// (N=12007, M=5000, W in {2,3,5}, k=250).
struct RunConfig {
  std::string corpus;
  std::string lexicon;
  std::string context;
  std::string embeddings;
  std::string scores;
  std::string cluster_a;
  std::string cluster_b;
  /// Output file, or output prefix for `context`.
  std::string out;

  std::size_t n = 12007;
  std::size_t m = 5000;
  std::vector<std::size_t> windows{2, 3, 5};
  bool concat = false;

  std::string method;
  std::size_t k = 250;
  std::string kernel = "skew";
  double a = 0.999;
  /// Empty selects the median heuristic.
  std::optional<double> sigma;
  std::optional<std::uint64_t> seed;
  std::size_t restarts = 10;
  /// Brown active-cluster window; 0 means k.
  std::size_t brown_window = 0;
};

namespace detail {

inline std::ifstream open_input(const std::string& path, const char* what) {
  if (path.empty()) throw Error(std::string("missing ") + what + " path");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(std::string("cannot open ") + what + " '" + path + "'");
  return in;
}

inline std::ofstream open_output(const std::string& path) {
  if (path.empty()) throw Error("missing output path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

template <typename Reader>
auto read_file(const std::string& path, const char* what, Reader&& reader) {
  auto in = open_input(path, what);
  try {
    return reader(in);
  } catch (const ParseError& e) {
    throw Error(std::string(what) + " '" + path + "': " + e.what());
  }
}

inline std::vector<std::string> lexicon_words(const Lexicon& lexicon) {
  std::vector<std::string> w;
  w.reserve(lexicon.size());
  for (const auto& e : lexicon.entries()) w.push_back(e.word);
  return w;
}

inline std::vector<Sentence> read_corpus(const std::string& path) {
  auto in = open_input(path, "corpus");
  return tokenize_corpus(in);
}

}  // namespace detail

/// Writes the lexicon TSV built from the corpus.
inline Lexicon cmd_lexicon(const RunConfig& config) {
  const auto sentences = detail::read_corpus(config.corpus);
  auto lexicon = build_lexicon(sentences, config.n);
  auto out = detail::open_output(config.out);
  write_lexicon(out, lexicon);
  detail::finish(out, config.out);
  return lexicon;
}

/**
 * Writes `<out>.w<W>.ctx` for every window size (plus `<out>.concat.ctx` with
 * `concat`), or `<out>.emb.ctx` when an embedding file is given. Returns the
 * written paths in order.
 */
inline std::vector<std::string> cmd_context(const RunConfig& config, std::ostream* log = nullptr) {
  const auto lexicon = detail::read_file(config.lexicon, "lexicon", [](std::istream& in) { return read_lexicon(in); });
  std::vector<std::string> written;
  auto emit = [&](const ContextMatrix& c, const std::string& path) {
    auto out = detail::open_output(path);
    write_context_matrix(out, c);
    detail::finish(out, path);
    written.push_back(path);
  };

  if (!config.embeddings.empty()) {
    auto in = detail::open_input(config.embeddings, "embedding file");
    EmbeddingLoad load;
    try {
      load = load_embedding_matrix(in, lexicon);
    } catch (const ParseError& e) {
      throw Error("embedding file '" + config.embeddings + "': " + e.what());
    }
    if (log && !load.missing.empty()) {
      *log << load.missing.size() << " lexicon words have no vector and were given zero rows\n";
    }
    emit(load.matrix, config.out + ".emb.ctx");
    return written;
  }

  if (config.windows.empty()) throw Error("no window sizes given");
  const auto sentences = detail::read_corpus(config.corpus);
  const auto indexed = index_corpus(sentences, lexicon);
  const auto descriptors = select_descriptors(lexicon, config.m);
  std::vector<ContextMatrix> parts;
  for (auto w : config.windows) {
    parts.push_back(build_context_matrix(indexed, lexicon.size(), descriptors, w));
    emit(parts.back(), config.out + ".w" + std::to_string(w) + ".ctx");
  }
  if (config.concat) emit(concat_context_matrices(parts), config.out + ".concat.ctx");
  return written;
}

inline const std::vector<std::string>& cluster_methods() {
  static const std::vector<std::string> m{"kmeans", "spectral-njw", "spectral-ncut", "brown"};
  return m;
}

/**
 * Writes the cluster file to `out`. Spectral methods also write the embedding
 * dump to `<out>.emb.tsv`; Brown writes the merge history to `<out>.merges.tsv`.
 */
inline Clustering cmd_cluster(const RunConfig& config) {
  const auto& method = config.method;
  bool known = false;
  for (const auto& m : cluster_methods()) known = known || m == method;
  if (!known) throw Error("unknown method '" + method + "' (expected kmeans, spectral-njw, spectral-ncut or brown)");

  const auto lexicon = detail::read_file(config.lexicon, "lexicon", [](std::istream& in) { return read_lexicon(in); });
  const auto words = detail::lexicon_words(lexicon);
  Metadata meta;
  Clustering result;

  if (method == "brown") {
    if (!config.context.empty()) throw Error("method brown reads --corpus and --lexicon, not a context matrix");
    const auto sentences = detail::read_corpus(config.corpus);
    const auto indexed = index_corpus(sentences, lexicon);
    auto b = brown_cluster(indexed, lexicon, config.k, config.brown_window);
    meta.emplace_back("window", std::to_string(config.brown_window == 0 ? config.k : config.brown_window));
    meta.emplace_back("mi", detail::format_double(b.mutual_information));
    const auto hist_path = config.out + ".merges.tsv";
    auto hist = detail::open_output(hist_path);
    write_merge_history(hist, b.history);
    detail::finish(hist, hist_path);
    result = std::move(b.clustering);
  } else {
    if (!config.corpus.empty()) throw Error("method " + method + " reads a context matrix (--context), not a corpus");
    if (!config.seed) throw Error("method " + method + " is stochastic and needs --seed");
    const auto context =
        detail::read_file(config.context, "context matrix", [](std::istream& in) { return read_context_matrix(in); });
    if (context.size() != lexicon.size()) {
      throw Error("context matrix has " + std::to_string(context.size()) + " rows but the lexicon has " +
                  std::to_string(lexicon.size()) + " entries");
    }
    meta.emplace_back("seed", std::to_string(*config.seed));
    meta.emplace_back("restarts", std::to_string(config.restarts));
    meta.emplace_back("windows", detail::join_windows(context.windows));
    meta.emplace_back("representation", to_string(context.kind));

    if (method == "kmeans") {
      KMeansOptions ko;
      ko.restarts = config.restarts;
      auto km = kmeans(context.rows, config.k, *config.seed, ko);
      meta.emplace_back("objective", detail::format_double(km.objective));
      result = std::move(km.clustering);
    } else {
      AffinityParams params;
      params.kernel = parse_kernel(config.kernel);
      params.a = config.a;
      params.sigma = config.sigma;
      const auto affinity = build_affinity(context, params);
      meta.emplace_back("kernel", to_string(affinity.kernel));
      meta.emplace_back("a", detail::format_double(affinity.a));
      meta.emplace_back("sigma", detail::format_double(affinity.sigma));

      SpectralOptions so;
      so.restarts = config.restarts;
      SpectralResult sr;
      try {
        sr = method == "spectral-njw" ? njw_cluster(affinity.values, config.k, *config.seed, so)
                                      : modified_ncut_cluster(affinity.values, config.k, *config.seed, so);
      } catch (const DisconnectedVertexError& e) {
        throw Error("word '" + lexicon.word(e.vertex()) + "' has zero affinity to every other word");
      }
      const auto emb_path = config.out + ".emb.tsv";
      auto emb = detail::open_output(emb_path);
      write_embedding_dump(emb, sr.embedding, *sr.clustering.centers, words);
      detail::finish(emb, emb_path);
      result = std::move(sr.clustering);
    }
  }

  auto out = detail::open_output(config.out);
  write_cluster_file(out, result, words, meta);
  detail::finish(out, config.out);
  return result;
}

/// Writes the VI report (plus oracle analysis with a score file) to `out`, or
/// to `fallback` when no output path is set.
inline ComparisonReport cmd_compare(const RunConfig& config, std::ostream& fallback) {
  auto reader = [](std::istream& in) { return read_cluster_file(in); };
  const auto a = detail::read_file(config.cluster_a, "cluster file", reader);
  const auto b = detail::read_file(config.cluster_b, "cluster file", reader);
  if (a.words != b.words) throw Error("cluster files '" + config.cluster_a + "' and '" + config.cluster_b +
                                      "' are over different lexicons");
  std::optional<ScoreTable> scores;
  if (!config.scores.empty()) {
    scores = detail::read_file(config.scores, "score file", [](std::istream& in) { return read_score_table(in); });
  }
  const auto report = compare_clusterings(a.clustering, b.clustering, scores ? &*scores : nullptr);
  if (config.out.empty()) {
    write_comparison_report(fallback, report);
  } else {
    auto out = detail::open_output(config.out);
    write_comparison_report(out, report);
    detail::finish(out, config.out);
  }
  return report;
}

}  // namespace lexclust
