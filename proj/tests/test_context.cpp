#include <gtest/gtest.h>

#include <sstream>

#include "lexclust/context.hpp"
#include "lexclust/random.hpp"
#include "oracles/oracles.hpp"

using namespace lexclust;

namespace {

double right_count(const ContextMatrix& c, std::size_t word, std::size_t j) {
  return c.rows(static_cast<Eigen::Index>(word), static_cast<Eigen::Index>(j));
}

double left_count(const ContextMatrix& c, std::size_t word, std::size_t j, std::size_t m) {
  return c.rows(static_cast<Eigen::Index>(word), static_cast<Eigen::Index>(m + j));
}

}  // namespace

TEST(Descriptors, TopRankedWords) {
  const Lexicon l({{"a", 5}, {"b", 3}, {"RARE", 1}});
  EXPECT_EQ(select_descriptors(l, 2).words, (std::vector<std::size_t>{0, 1}));
}

TEST(Descriptors, TieFollowsLexiconOrder) {
  const Lexicon l({{"a", 5}, {"b", 5}, {"c", 1}, {"RARE", 0}});
  const auto d = select_descriptors(l, 1);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(l.word(d.words[0]), "a");
}

TEST(Descriptors, InfeasibleMNamesTheMaximum) {
  const Lexicon l({{"a", 5}, {"RARE", 0}});
  try {
    select_descriptors(l, 2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("M=1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(select_descriptors(l, 0), Error);
}

TEST(Context, SinglePair) {
  const Lexicon l({{"a", 1}, {"b", 1}, {"RARE", 0}});
  const std::vector<Sentence> s{{"a", "b"}};
  const auto c = build_context_matrix(s, l, select_descriptors(l, 1), 1);
  EXPECT_EQ(c.rows.rows(), 3);
  EXPECT_EQ(c.rows.cols(), 2);
  EXPECT_EQ(right_count(c, 1, 0), 1.0);
  EXPECT_EQ(left_count(c, 1, 0, 1), 0.0);
  EXPECT_EQ(c.rows.sum(), 1.0);
}

TEST(Context, ExhaustiveSmallSentence) {
  const Lexicon l({{"a", 2}, {"b", 1}, {"RARE", 0}});
  const std::vector<Sentence> s{{"a", "b", "a"}};
  const auto c = build_context_matrix(s, l, select_descriptors(l, 1), 2);
  EXPECT_EQ(right_count(c, 0, 0), 1.0);
  EXPECT_EQ(right_count(c, 1, 0), 1.0);
  EXPECT_EQ(left_count(c, 1, 0, 1), 1.0);
  EXPECT_EQ(left_count(c, 0, 0, 1), 1.0);
}

TEST(Context, WindowsDoNotCrossSentences) {
  const Lexicon l({{"a", 1}, {"b", 1}, {"RARE", 0}});
  const std::vector<Sentence> s{{"a"}, {"b"}};
  for (std::size_t w : {1u, 2u, 5u}) {
    const auto c = build_context_matrix(s, l, select_descriptors(l, 2), w);
    EXPECT_EQ(c.rows.sum(), 0.0);
  }
}

TEST(Context, RareTokensAreCountedInTheRareRow) {
  const Lexicon l({{"a", 2}, {"RARE", 0}});
  const std::vector<Sentence> s{{"zz", "a", "yy"}};
  const auto c = build_context_matrix(s, l, select_descriptors(l, 1), 1);
  EXPECT_EQ(right_count(c, 1, 0), 1.0);
  EXPECT_EQ(left_count(c, 1, 0, 1), 1.0);
}

TEST(Context, ZeroWindowRejected) {
  const Lexicon l({{"a", 1}, {"RARE", 0}});
  const std::vector<IndexedSentence> s{{0, 1}};
  EXPECT_THROW(build_context_matrix(s, l.size(), select_descriptors(l, 1), 0), Error);
}

TEST(Context, MatchesPairEnumerationOnRandomCorpora) {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng.index(10);
    const std::size_t m = 1 + rng.index(n - 1);
    std::vector<IndexedSentence> corpus(1 + rng.index(20));
    for (auto& s : corpus) {
      s.resize(rng.index(15));
      for (auto& t : s) t = static_cast<std::uint32_t>(rng.index(n));
    }
    DescriptorSet d;
    std::vector<std::size_t> desc;
    for (std::size_t j = 0; j < m; ++j) desc.push_back(j);
    d.words = desc;
    for (std::size_t w : {1u, 2u, 3u, 5u}) {
      const auto c = build_context_matrix(corpus, n, d, w);
      const auto expect = oracle::enumerate_window_pairs(corpus, n, desc, w);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < 2 * m; ++j) {
          ASSERT_EQ(c.rows(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), expect[i][j]);
        }
      }
    }
  }
}

TEST(Context, PartialCountsSumToFullMatrix) {
  const std::vector<IndexedSentence> corpus{{0, 1, 2, 0}, {2, 2, 1}, {0}, {1, 0, 1, 0, 2}};
  DescriptorSet d;
  d.words = {0, 1};
  const auto full = build_context_matrix(corpus, 3, d, 2);
  RowMatrix part = RowMatrix::Zero(3, 4);
  accumulate_context_counts(std::span(corpus).subspan(0, 2), d, 2, part);
  accumulate_context_counts(std::span(corpus).subspan(2), d, 2, part);
  EXPECT_EQ(part, full.rows);
}

TEST(Concat, RowsAreJoinedFeatureWise) {
  ContextMatrix a, b;
  a.rows = RowMatrix::Constant(2, 4, 1.0);
  a.windows = {2};
  b.rows = RowMatrix::Constant(2, 4, 2.0);
  b.rows(1, 3) = 7.0;
  b.windows = {3};
  const std::vector<ContextMatrix> parts{a, b};
  const auto c = concat_context_matrices(parts);
  ASSERT_EQ(c.rows.cols(), 8);
  EXPECT_EQ(c.rows.row(1).head(4), a.rows.row(1));
  EXPECT_EQ(c.rows.row(1).tail(4), b.rows.row(1));
  EXPECT_EQ(c.windows, (std::vector<std::size_t>{2, 3}));
}

TEST(Concat, SingleMatrixIsIdentity) {
  ContextMatrix a;
  a.rows = RowMatrix::Random(3, 2);
  a.windows = {5};
  const std::vector<ContextMatrix> parts{a};
  const auto c = concat_context_matrices(parts);
  EXPECT_EQ(c.rows, a.rows);
  EXPECT_EQ(c.windows, a.windows);
}

TEST(Concat, RowMismatchRejected) {
  ContextMatrix a, b;
  a.rows = RowMatrix::Zero(3, 2);
  b.rows = RowMatrix::Zero(4, 2);
  const std::vector<ContextMatrix> parts{a, b};
  EXPECT_THROW(concat_context_matrices(parts), Error);
}

TEST(Embeddings, FullCoverage) {
  const Lexicon l({{"cat", 3}, {"dog", 2}, {"RARE", 1}});
  std::istringstream in("dog 4 5 6\ncat 1 2 3\nRARE 0 0 1\nzebra 9 9 9\n");
  const auto load = load_embedding_matrix(in, l);
  EXPECT_TRUE(load.missing.empty());
  EXPECT_EQ(load.matrix.kind, RepresentationKind::embedding);
  ASSERT_EQ(load.matrix.rows.rows(), 3);
  ASSERT_EQ(load.matrix.rows.cols(), 3);
  EXPECT_EQ(load.matrix.rows(0, 2), 3.0);
  EXPECT_EQ(load.matrix.rows(1, 0), 4.0);
  EXPECT_EQ(load.matrix.rows(2, 2), 1.0);
}

TEST(Embeddings, MissingWordsGetZeroRows) {
  const Lexicon l({{"a", 5}, {"b", 4}, {"c", 3}, {"RARE", 1}});
  std::istringstream in("2 2\nb 1.5 -2\nRARE 1 1\n");
  const auto load = load_embedding_matrix(in, l);
  EXPECT_EQ(load.missing, (std::vector<std::string>{"a", "c"}));
  EXPECT_EQ(load.matrix.rows.row(0).squaredNorm(), 0.0);
  EXPECT_EQ(load.matrix.rows.row(2).squaredNorm(), 0.0);
  EXPECT_EQ(load.matrix.rows(1, 1), -2.0);
}

TEST(Embeddings, MalformedLineReportsLineNumber) {
  const Lexicon l({{"cat", 1}, {"RARE", 0}});
  std::istringstream in("dog 1.0 2.0\ncat 1.0 x\n");
  try {
    load_embedding_matrix(in, l);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Embeddings, InconsistentDimensionRejected) {
  const Lexicon l({{"cat", 1}, {"RARE", 0}});
  std::istringstream in("dog 1 2\ncat 1 2 3\n");
  EXPECT_THROW(load_embedding_matrix(in, l), ParseError);
}

TEST(ContextFile, CountRoundTrip) {
  ContextMatrix c;
  c.rows = RowMatrix::Zero(2, 4);
  c.rows << 1, 0, 3, 12, 0, 0, 7, 1;
  c.windows = {2, 3};
  std::stringstream buf;
  write_context_matrix(buf, c);
  EXPECT_EQ(buf.str(), "2 4 2,3 count\n1 0 3 12\n0 0 7 1\n");
  const auto back = read_context_matrix(buf);
  EXPECT_EQ(back.rows, c.rows);
  EXPECT_EQ(back.windows, c.windows);
  EXPECT_EQ(back.kind, RepresentationKind::count);
}

TEST(ContextFile, EmbeddingRoundTripIsExact) {
  ContextMatrix c;
  c.kind = RepresentationKind::embedding;
  c.rows = RowMatrix(2, 2);
  c.rows << 0.1, -1.0 / 3.0, 1e-300, 12345.678901234567;
  std::stringstream buf;
  write_context_matrix(buf, c);
  const auto back = read_context_matrix(buf);
  EXPECT_EQ(back.rows, c.rows);
  EXPECT_TRUE(back.windows.empty());
  EXPECT_EQ(back.kind, RepresentationKind::embedding);
}

TEST(ContextFile, TruncatedFileRejected) {
  std::stringstream buf("3 2 1 count\n1 2\n3 4\n");
  EXPECT_THROW(read_context_matrix(buf), ParseError);
}
