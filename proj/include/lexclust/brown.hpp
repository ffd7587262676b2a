#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexclust/clustering.hpp"
#include "lexclust/corpus.hpp"
#include "lexclust/error.hpp"

/**
 * @file brown.hpp
 * @brief Greedy agglomerative Brown clustering over class-bigram mutual information.
 *
 * Every lexicon type starts as its own cluster whose id is the type's lexicon
 * index. A merge of clusters a < b keeps id a. Probabilities are maximum
 * likelihood ratios of within-sentence bigram counts, and cluster marginals
 * are the left/right margins of the bigram table, so a single cluster has
 * mutual information exactly zero.
 */

namespace lexclust {

/// Class-bigram counts over a partition of the lexicon types.
class ClassBigramStats {
 public:
  ClassBigramStats() = default;

  ClassBigramStats(std::span<const IndexedSentence> corpus, std::size_t lexicon_size)
      : out_(lexicon_size),
        in_(lexicon_size),
        left_(lexicon_size, 0.0),
        right_(lexicon_size, 0.0),
        unigram_(lexicon_size, 0.0),
        type_unigram_(lexicon_size, 0),
        cluster_of_(lexicon_size),
        alive_(lexicon_size, true) {
    std::iota(cluster_of_.begin(), cluster_of_.end(), std::size_t{0});
    for (const auto& s : corpus) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] >= lexicon_size) throw Error("token index outside the lexicon");
        unigram_[s[i]] += 1.0;
        ++type_unigram_[s[i]];
        ++tokens_;
        if (i + 1 < s.size()) add_bigram(s[i], s[i + 1], 1.0);
      }
    }
  }

  std::size_t type_count() const noexcept { return cluster_of_.size(); }
  std::uint64_t total_tokens() const noexcept { return tokens_; }
  double total_bigrams() const noexcept { return bigrams_; }

  bool alive(std::size_t c) const { return alive_.at(c); }
  std::size_t cluster_count() const { return static_cast<std::size_t>(std::count(alive_.begin(), alive_.end(), true)); }

  std::vector<std::size_t> clusters() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < alive_.size(); ++c) {
      if (alive_[c]) out.push_back(c);
    }
    return out;
  }

  /// Cluster id currently holding lexicon type `t`.
  std::size_t cluster_of(std::size_t t) const { return cluster_of_.at(t); }
  const std::vector<std::size_t>& assignment() const noexcept { return cluster_of_; }

  double unigram(std::size_t c) const { return unigram_.at(c); }
  std::uint64_t type_frequency(std::size_t t) const { return type_unigram_.at(t); }
  double left_margin(std::size_t c) const { return left_.at(c); }
  double right_margin(std::size_t c) const { return right_.at(c); }

  double bigram(std::size_t l, std::size_t r) const {
    const auto& row = out_.at(l);
    auto it = row.find(static_cast<std::uint32_t>(r));
    return it == row.end() ? 0.0 : it->second;
  }

  /// Successor counts of cluster l (right neighbours).
  const std::unordered_map<std::uint32_t, double>& successors(std::size_t l) const { return out_.at(l); }
  /// Predecessor counts of cluster r (left neighbours).
  const std::unordered_map<std::uint32_t, double>& predecessors(std::size_t r) const { return in_.at(r); }

  /// One term p(l,r) log(p(l,r) / (p_left(l) p_right(r))) from raw counts.
  double term(double count, double left_count, double right_count) const {
    if (count <= 0.0) return 0.0;
    return count / bigrams_ * std::log(count * bigrams_ / (left_count * right_count));
  }

  double term(std::size_t l, std::size_t r) const { return term(bigram(l, r), left_[l], right_[r]); }

  /// Folds cluster b into cluster a. Both must be alive and distinct.
  void merge(std::size_t a, std::size_t b) {
    if (a == b || !alive_.at(a) || !alive_.at(b)) throw Error("invalid merge of clusters");
    auto row_b = std::move(out_[b]);
    auto col_b = std::move(in_[b]);
    out_[b].clear();
    in_[b].clear();
    for (const auto& [r, c] : row_b) {
      in_[r].erase(static_cast<std::uint32_t>(b));
    }
    for (const auto& [l, c] : col_b) {
      out_[l].erase(static_cast<std::uint32_t>(b));
    }
    for (const auto& [r, c] : row_b) {
      const std::size_t to = r == b ? a : r;
      add_count(a, to, c);
    }
    for (const auto& [l, c] : col_b) {
      if (l == b) continue;  // self loop already moved with the row
      add_count(l, a, c);
    }
    left_[a] += left_[b];
    right_[a] += right_[b];
    unigram_[a] += unigram_[b];
    left_[b] = right_[b] = unigram_[b] = 0.0;
    alive_[b] = false;
    for (auto& c : cluster_of_) {
      if (c == b) c = a;
    }
  }

 private:
  void add_count(std::size_t l, std::size_t r, double c) {
    out_[l][static_cast<std::uint32_t>(r)] += c;
    in_[r][static_cast<std::uint32_t>(l)] += c;
  }

  void add_bigram(std::size_t l, std::size_t r, double c) {
    add_count(l, r, c);
    left_[l] += c;
    right_[r] += c;
    bigrams_ += c;
  }

  std::vector<std::unordered_map<std::uint32_t, double>> out_;
  std::vector<std::unordered_map<std::uint32_t, double>> in_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> unigram_;
  std::vector<std::uint64_t> type_unigram_;
  std::vector<std::size_t> cluster_of_;
  std::vector<bool> alive_;
  std::uint64_t tokens_ = 0;
  double bigrams_ = 0.0;
};

/// I(C) = sum over cluster pairs of p(l,r) log(p(l,r) / (p_left(l) p_right(r))), in nats.
inline double mutual_information(const ClassBigramStats& stats) {
  double sum = 0.0;
  for (auto l : stats.clusters()) {
    for (const auto& [r, c] : stats.successors(l)) sum += stats.term(c, stats.left_margin(l), stats.right_margin(r));
  }
  return sum;
}

/// H(V) over positive-frequency lexicon entries, in nats.
inline double vocabulary_entropy(std::span<const std::uint64_t> frequencies) {
  double total = 0.0;
  for (auto f : frequencies) total += static_cast<double>(f);
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (auto f : frequencies) {
    if (f == 0) continue;
    const double p = static_cast<double>(f) / total;
    h -= p * std::log(p);
  }
  return h;
}

inline double vocabulary_entropy(const Lexicon& lexicon) {
  std::vector<std::uint64_t> f;
  for (const auto& e : lexicon.entries()) f.push_back(e.frequency);
  return vocabulary_entropy(f);
}

inline double vocabulary_entropy(const ClassBigramStats& stats) {
  std::vector<std::uint64_t> f(stats.type_count());
  for (std::size_t t = 0; t < f.size(); ++t) f[t] = stats.type_frequency(t);
  return vocabulary_entropy(f);
}

namespace detail {

/// Reusable dense accumulator keyed by cluster id.
class ScratchRow {
 public:
  explicit ScratchRow(std::size_t n = 0) : value_(n, 0.0), used_(n, false) {}

  void add(std::size_t key, double v) {
    if (!used_[key]) {
      used_[key] = true;
      keys_.push_back(key);
    }
    value_[key] += v;
  }

  template <typename F>
  void drain(F&& f) {
    for (auto key : keys_) {
      f(key, value_[key]);
      value_[key] = 0.0;
      used_[key] = false;
    }
    keys_.clear();
  }

 private:
  std::vector<double> value_;
  std::vector<bool> used_;
  std::vector<std::size_t> keys_;
};

}  // namespace detail

/// Loss in I(C) from merging a and b, computed directly from the counts in
/// O(size of rows and columns a, b).
inline double merge_loss(const ClassBigramStats& s, std::size_t a, std::size_t b, detail::ScratchRow& row,
                         detail::ScratchRow& col) {
  double before = 0.0;
  for (const auto& [r, c] : s.successors(a)) before += s.term(c, s.left_margin(a), s.right_margin(r));
  for (const auto& [r, c] : s.successors(b)) before += s.term(c, s.left_margin(b), s.right_margin(r));
  for (const auto& [l, c] : s.predecessors(a)) {
    if (l != a && l != b) before += s.term(c, s.left_margin(l), s.right_margin(a));
  }
  for (const auto& [l, c] : s.predecessors(b)) {
    if (l != a && l != b) before += s.term(c, s.left_margin(l), s.right_margin(b));
  }

  const double left_m = s.left_margin(a) + s.left_margin(b);
  const double right_m = s.right_margin(a) + s.right_margin(b);
  double self = 0.0;
  for (auto src : {a, b}) {
    for (const auto& [r, c] : s.successors(src)) {
      if (r == a || r == b) {
        self += c;
      } else {
        row.add(r, c);
      }
    }
    for (const auto& [l, c] : s.predecessors(src)) {
      if (l != a && l != b) col.add(l, c);
    }
  }
  double after = s.term(self, left_m, right_m);
  row.drain([&](std::size_t r, double c) { after += s.term(c, left_m, s.right_margin(r)); });
  col.drain([&](std::size_t l, double c) { after += s.term(c, s.left_margin(l), right_m); });
  return before - after;
}

inline double merge_loss(const ClassBigramStats& s, std::size_t a, std::size_t b) {
  detail::ScratchRow row(s.type_count()), col(s.type_count());
  return merge_loss(s, a, b, row, col);
}

struct MergeChoice {
  std::size_t a = 0;
  std::size_t b = 0;
  /// I(C) after the merge minus I(C) before; never positive.
  double quality_delta = 0.0;
};

/// Relative tolerance under which two merge losses count as tied.
inline constexpr double kMergeTieTolerance = 1e-12;

/// Exhaustive search over every unordered pair of alive clusters. Ties go to
/// the lexicographically smallest (a, b) with a < b.
inline MergeChoice best_merge(const ClassBigramStats& stats) {
  const auto ids = stats.clusters();
  if (ids.size() < 2) throw Error("best_merge needs at least two clusters");
  detail::ScratchRow row(stats.type_count()), col(stats.type_count());
  MergeChoice best;
  double best_loss = 0.0;
  bool found = false;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const double loss = merge_loss(stats, ids[i], ids[j], row, col);
      if (!found || loss < best_loss - kMergeTieTolerance * std::max(1.0, std::abs(best_loss))) {
        found = true;
        best_loss = loss;
        best = {ids[i], ids[j], -loss};
      }
    }
  }
  return best;
}

struct MergeRecord {
  std::size_t cluster_a = 0;
  std::size_t cluster_b = 0;
  double mutual_information_after = 0.0;
};

using MergeHistory = std::vector<MergeRecord>;

/**
 * @brief Incremental Brown clustering state.
 *
 * Keeps up to `window + 1` active clusters and a cache of merge losses for
 * every active pair. After a merge of (a, b) the cached loss of every other
 * active pair (l, m) is corrected in O(1): only the cells of rows and columns
 * l, m against a and b change, so the correction subtracts those terms before
 * the merge and adds the terms against the merged cluster after it.
 */
class BrownClusterer {
 public:
  BrownClusterer(std::span<const IndexedSentence> corpus, std::size_t lexicon_size, std::size_t k, std::size_t window)
      : stats_(corpus, lexicon_size),
        k_(k),
        window_(window),
        row_(lexicon_size),
        col_(lexicon_size),
        loss_(window + 1, std::vector<double>(window + 1, 0.0)),
        slot_id_(window + 1, kFree),
        slot_for_id_(lexicon_size, kFree) {
    if (k < 2) throw Error("Brown clustering needs k >= 2");
    if (k > lexicon_size) {
      throw Error("k=" + std::to_string(k) + " exceeds the lexicon size " + std::to_string(lexicon_size));
    }
    if (window < k) throw Error("active window must be at least k");
    window_ = std::min(window_, lexicon_size);
    mi_ = lexclust::mutual_information(stats_);
    for (std::size_t t = 0; t < window_; ++t) activate(t);
    next_type_ = window_;
  }

  const ClassBigramStats& stats() const noexcept { return stats_; }
  const MergeHistory& history() const noexcept { return history_; }
  std::size_t k() const noexcept { return k_; }

  /// Incrementally tracked I(C).
  double mutual_information() const noexcept { return mi_; }

  /// Active cluster ids, ascending.
  std::vector<std::size_t> active() const {
    std::vector<std::size_t> ids;
    for (auto id : slot_id_) {
      if (id != kFree) ids.push_back(id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  }

  bool has_pending_types() const noexcept { return next_type_ < stats_.type_count(); }

  bool done() const { return !has_pending_types() && active().size() <= k_; }

  /// Cached loss of merging active clusters a and b.
  double cached_loss(std::size_t a, std::size_t b) const { return loss_[slot_of(a)][slot_of(b)]; }

  /// Activates the next type in lexicon (frequency) order.
  void insert_next() {
    if (!has_pending_types()) throw Error("no types left to insert");
    activate(next_type_++);
  }

  /// Best active pair by cached loss; ties to the smallest (a, b).
  MergeChoice best_merge() const {
    const auto ids = active();
    if (ids.size() < 2) throw Error("best_merge needs at least two active clusters");
    MergeChoice best;
    double best_loss = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t j = i + 1; j < ids.size(); ++j) {
        const double loss = cached_loss(ids[i], ids[j]);
        if (!found || loss < best_loss - kMergeTieTolerance * std::max(1.0, std::abs(best_loss))) {
          found = true;
          best_loss = loss;
          best = {ids[i], ids[j], -loss};
        }
      }
    }
    return best;
  }

  void merge(std::size_t a, std::size_t b) {
    if (a > b) std::swap(a, b);
    const auto sa = slot_of(a);
    const auto sb = slot_of(b);
    const double loss = loss_[sa][sb];

    std::vector<std::size_t> others;
    for (auto id : active()) {
      if (id != a && id != b) others.push_back(id);
    }
    const std::size_t m = others.size();
    std::vector<double> correction(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) correction[i * m + j] = -cross_terms(others[i], others[j], a, b);
    }

    stats_.merge(a, b);
    mi_ -= loss;
    slot_id_[sb] = kFree;
    slot_for_id_[b] = kFree;
    history_.push_back({a, b, mi_});

    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const double delta = correction[i * m + j] + cross_terms(others[i], others[j], a, a);
        const auto si = slot_of(others[i]);
        const auto sj = slot_of(others[j]);
        loss_[si][sj] += delta;
        loss_[sj][si] = loss_[si][sj];
      }
    }
    for (auto x : others) {
      const double l = lexclust::merge_loss(stats_, a, x, row_, col_);
      loss_[sa][slot_of(x)] = loss_[slot_of(x)][sa] = l;
    }
  }

  /// One outline iteration: insert the next type if any, then merge the best
  /// pair while more than the allowed number of clusters are active.
  void step() {
    if (has_pending_types()) {
      insert_next();
      const auto c = best_merge();
      merge(c.a, c.b);
    } else if (active().size() > k_) {
      const auto c = best_merge();
      merge(c.a, c.b);
    }
  }

  void run() {
    while (!done()) step();
  }

  /// Surviving cluster ids, ascending, relabelled 0..k-1.
  Clustering clustering() const { return relabel(stats_.assignment()); }

  static Clustering relabel(const std::vector<std::size_t>& representative) {
    std::vector<std::size_t> ids(representative);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::size_t> assignment(representative.size());
    for (std::size_t t = 0; t < representative.size(); ++t) {
      assignment[t] = static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), representative[t]) - ids.begin());
    }
    return make_clustering(std::move(assignment), ids.size(), "brown");
  }

 private:
  static constexpr std::size_t kFree = std::numeric_limits<std::size_t>::max();

  std::size_t slot_of(std::size_t id) const {
    const auto s = id < slot_for_id_.size() ? slot_for_id_[id] : kFree;
    if (s == kFree) throw Error("cluster " + std::to_string(id) + " is not active");
    return s;
  }

  void activate(std::size_t t) {
    std::size_t s = 0;
    while (slot_id_[s] != kFree) ++s;
    for (std::size_t o = 0; o < slot_id_.size(); ++o) {
      if (slot_id_[o] == kFree) continue;
      const double l = lexclust::merge_loss(stats_, slot_id_[o], t, row_, col_);
      loss_[s][o] = loss_[o][s] = l;
    }
    slot_id_[s] = t;
    slot_for_id_[t] = s;
  }

  // Part of merge_loss(l, m) made of cells pairing l, m or their union with
  // clusters x and y (pass x == y for a single cluster).
  double cross_terms(std::size_t l, std::size_t m, std::size_t x, std::size_t y) const {
    const auto& s = stats_;
    const double ll = s.left_margin(l) + s.left_margin(m);
    const double rr = s.right_margin(l) + s.right_margin(m);
    double sum = 0.0;
    auto one = [&](std::size_t z) {
      sum += s.term(l, z) + s.term(z, l) + s.term(m, z) + s.term(z, m);
      sum -= s.term(s.bigram(l, z) + s.bigram(m, z), ll, s.right_margin(z));
      sum -= s.term(s.bigram(z, l) + s.bigram(z, m), s.left_margin(z), rr);
    };
    one(x);
    if (y != x) one(y);
    return sum;
  }

  ClassBigramStats stats_;
  std::size_t k_;
  std::size_t window_;
  std::size_t next_type_ = 0;
  double mi_ = 0.0;
  detail::ScratchRow row_;
  detail::ScratchRow col_;
  std::vector<std::vector<double>> loss_;
  std::vector<std::size_t> slot_id_;
  std::vector<std::size_t> slot_for_id_;
  MergeHistory history_;
};

struct BrownResult {
  Clustering clustering;
  MergeHistory history;
  double mutual_information = 0.0;
};

/**
 * Seeds `window` (default k) singleton clusters with the most frequent types,
 * then inserts every remaining type in frequency order and merges the best
 * pair after each insertion. With window > k, the remaining clusters are then
 * merged down to k.
 */
inline BrownResult brown_cluster(std::span<const IndexedSentence> corpus, const Lexicon& lexicon, std::size_t k,
                                 std::size_t window = 0) {
  BrownClusterer b(corpus, lexicon.size(), k, window == 0 ? k : window);
  b.run();
  return {b.clustering(), b.history(), b.mutual_information()};
}

inline BrownResult brown_cluster(std::span<const Sentence> sentences, const Lexicon& lexicon, std::size_t k,
                                 std::size_t window = 0) {
  const auto indexed = index_corpus(sentences, lexicon);
  return brown_cluster(indexed, lexicon, k, window);
}

/// Applies a merge history to `type_count` singleton clusters.
inline Clustering replay_merges(std::size_t type_count, const MergeHistory& history) {
  std::vector<std::size_t> rep(type_count);
  std::iota(rep.begin(), rep.end(), std::size_t{0});
  for (const auto& m : history) {
    if (m.cluster_a >= type_count || m.cluster_b >= type_count) throw Error("merge history refers to unknown cluster");
    for (auto& r : rep) {
      if (r == m.cluster_b) r = m.cluster_a;
    }
  }
  return BrownClusterer::relabel(rep);
}

// Merge history file: step<TAB>cluster_a<TAB>cluster_b<TAB>I_after.

inline void write_merge_history(std::ostream& out, const MergeHistory& h) {
  for (std::size_t i = 0; i < h.size(); ++i) {
    out << i << '\t' << h[i].cluster_a << '\t' << h[i].cluster_b << '\t'
        << detail::format_double(h[i].mutual_information_after) << '\n';
  }
}

inline MergeHistory read_merge_history(std::istream& in) {
  MergeHistory h;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream f(line);
    std::size_t step = 0;
    MergeRecord r;
    if (!(f >> step >> r.cluster_a >> r.cluster_b >> r.mutual_information_after) || step != h.size()) {
      throw ParseError("expected step<TAB>cluster_a<TAB>cluster_b<TAB>I_after", lineno);
    }
    h.push_back(r);
  }
  return h;
}

}  // namespace lexclust
