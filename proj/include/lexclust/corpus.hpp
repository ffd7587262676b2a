#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexclust/error.hpp"

/**
 * @file corpus.hpp
 * @brief Corpus tokenization and the frequency-ranked lexicon.
 */

namespace lexclust {

/// Literal surface form of the catch-all lexicon entry.
inline constexpr std::string_view kRareToken = "RARE";

using Sentence = std::vector<std::string>;

/// Sentences as lexicon indices; produced by `index_corpus`.
using IndexedSentence = std::vector<std::uint32_t>;

namespace detail {

inline bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

inline void decapitalize(std::string& token) {
  // ASCII only; a multi-byte UTF-8 lead byte is left untouched.
  auto c = static_cast<unsigned char>(token.front());
  if (c < 0x80) token.front() = static_cast<char>(std::tolower(c));
}

}  // namespace detail

/// Splits one line into whitespace-separated tokens and lowercases the first
/// character of the first token.
inline Sentence tokenize_line(std::string_view line) {
  Sentence out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && detail::is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !detail::is_space(line[j])) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  if (!out.empty()) detail::decapitalize(out.front());
  return out;
}

/// One sentence per line; blank lines are dropped.
inline std::vector<Sentence> tokenize_corpus(std::istream& in) {
  std::vector<Sentence> sentences;
  std::string line;
  while (std::getline(in, line)) {
    auto s = tokenize_line(line);
    if (!s.empty()) sentences.push_back(std::move(s));
  }
  return sentences;
}

inline std::vector<Sentence> tokenize_corpus(std::string_view text) {
  std::istringstream in{std::string(text)};
  return tokenize_corpus(in);
}

/// Token -> corpus count. Partial tables from disjoint sentence ranges can be
/// merged with `merge_counts` in any order.
using FrequencyTable = std::unordered_map<std::string, std::uint64_t>;

inline FrequencyTable count_tokens(std::span<const Sentence> sentences) {
  FrequencyTable counts;
  for (const auto& s : sentences) {
    for (const auto& t : s) ++counts[t];
  }
  return counts;
}

inline void merge_counts(FrequencyTable& into, const FrequencyTable& from) {
  for (const auto& [word, n] : from) into[word] += n;
}

struct LexiconEntry {
  std::string word;
  std::uint64_t frequency = 0;

  bool operator==(const LexiconEntry&) const = default;
};

/**
 * @brief Frequency-ranked vocabulary with a trailing RARE entry.
 *
 * Entries other than RARE are sorted by descending frequency, ties broken by
 * ascending byte order of the word. RARE is always the last entry. Immutable
 * once constructed.
 */
class Lexicon {
 public:
  explicit Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
    if (entries_.empty() || entries_.back().word != kRareToken) {
      throw Error("lexicon must end with the RARE entry");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const auto& e = entries_[i];
      if (e.word.empty() || std::any_of(e.word.begin(), e.word.end(), detail::is_space)) {
        throw Error("lexicon entry " + std::to_string(i) + " is not a valid token");
      }
      if (!index_.emplace(e.word, i).second) throw Error("duplicate lexicon word '" + e.word + "'");
      if (i + 1 < rare_index() && !ranks_before(e, entries_[i + 1])) {
        throw Error("lexicon entries " + std::to_string(i) + " and " + std::to_string(i + 1) +
                    " are out of frequency order");
      }
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t rare_index() const noexcept { return entries_.size() - 1; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  const LexiconEntry& operator[](std::size_t i) const { return entries_.at(i); }
  const std::string& word(std::size_t i) const { return entries_.at(i).word; }

  /// Index of `token`, or `rare_index()` when it is not in the lexicon.
  std::size_t index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? rare_index() : it->second;
  }

  std::uint64_t total_frequency() const {
    std::uint64_t n = 0;
    for (const auto& e : entries_) n += e.frequency;
    return n;
  }

  /// Ranking order used for every non-RARE entry.
  static bool ranks_before(const LexiconEntry& a, const LexiconEntry& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.word < b.word;
  }

  bool operator==(const Lexicon& other) const { return entries_ == other.entries_; }

 private:
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Keeps the `n - 1` top-ranked tokens; everything else (including a literal
/// "RARE" token in the corpus) is folded into the RARE entry. The result has
/// fewer than `n` entries when the corpus has fewer distinct tokens.
inline Lexicon lexicon_from_counts(const FrequencyTable& counts, std::size_t n) {
  if (n < 2) throw Error("lexicon size N must be at least 2 (got " + std::to_string(n) + ")");
  if (counts.empty()) throw Error("corpus contains no tokens");

  std::vector<LexiconEntry> ranked;
  ranked.reserve(counts.size());
  std::uint64_t total = 0;
  for (const auto& [word, f] : counts) {
    total += f;
    if (word != kRareToken) ranked.push_back({word, f});
  }
  const std::size_t keep = std::min(ranked.size(), n - 1);
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    Lexicon::ranks_before);
  ranked.resize(keep);

  std::uint64_t kept = 0;
  for (const auto& e : ranked) kept += e.frequency;
  ranked.push_back({std::string(kRareToken), total - kept});
  return Lexicon(std::move(ranked));
}

inline Lexicon build_lexicon(std::span<const Sentence> sentences, std::size_t n) {
  return lexicon_from_counts(count_tokens(sentences), n);
}

inline std::size_t index_token(const Lexicon& lexicon, std::string_view token) {
  return lexicon.index_of(token);
}

inline std::vector<IndexedSentence> index_corpus(std::span<const Sentence> sentences, const Lexicon& lexicon) {
  std::vector<IndexedSentence> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    IndexedSentence row;
    row.reserve(s.size());
    for (const auto& t : s) row.push_back(static_cast<std::uint32_t>(lexicon.index_of(t)));
    out.push_back(std::move(row));
  }
  return out;
}

// Lexicon TSV: rank<TAB>word<TAB>frequency, rank is the 0-based lexicon index.

inline void write_lexicon(std::ostream& out, const Lexicon& lexicon) {
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    out << i << '\t' << lexicon[i].word << '\t' << lexicon[i].frequency << '\n';
  }
}

inline Lexicon read_lexicon(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("expected rank<TAB>word<TAB>frequency", lineno);
    try {
      std::size_t used = 0;
      const auto rank = std::stoull(line.substr(0, t1), &used);
      if (used != t1 || rank != entries.size()) throw ParseError("rank out of sequence", lineno);
      const auto freq_text = line.substr(t2 + 1);
      const auto freq = std::stoull(freq_text, &used);
      if (used != freq_text.size()) throw ParseError("bad frequency", lineno);
      entries.push_back({line.substr(t1 + 1, t2 - t1 - 1), freq});
    } catch (const std::logic_error&) {
      throw ParseError("bad number", lineno);
    }
  }
  try {
    return Lexicon(std::move(entries));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace lexclust
