#include <gtest/gtest.h>

#include <cmath>

#include "lexclust/metrics.hpp"
#include "lexclust/random.hpp"
#include "lexclust/spectral.hpp"
#include "oracles/oracles.hpp"

using namespace lexclust;

namespace {

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

/// Cliques of the given sizes with weight 1 inside and `eps` across.
Matrix block_affinity(const std::vector<std::size_t>& sizes, double eps, std::vector<std::size_t>* truth = nullptr) {
  std::vector<std::size_t> label;
  for (std::size_t b = 0; b < sizes.size(); ++b) label.insert(label.end(), sizes[b], b);
  const auto n = static_cast<Eigen::Index>(label.size());
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = i == j ? 0.0 : (label[static_cast<std::size_t>(i)] == label[static_cast<std::size_t>(j)] ? 1.0 : eps);
    }
  }
  if (truth) *truth = label;
  return a;
}

oracle::DenseMatrix to_dense(const Matrix& m) {
  oracle::DenseMatrix d(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return d;
}

}  // namespace

TEST(Degree, Examples) {
  EXPECT_EQ(degree(from_rows({{0, 1}, {1, 0}})), Vector::Ones(2));
  const Vector d = degree(from_rows({{0, 2, 1}, {2, 0, 0}, {1, 0, 0}}));
  EXPECT_EQ(d, (Vector(3) << 3, 2, 1).finished());
}

TEST(Degree, ZeroRowNamesTheVertex) {
  try {
    degree(from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
    FAIL() << "expected an error";
  } catch (const DisconnectedVertexError& e) {
    EXPECT_EQ(e.vertex(), 2u);
  }
}

TEST(Laplacian, Examples) {
  const Matrix a = from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(normalized_laplacian(a, degree(a)), a);
  const Matrix b = from_rows({{0, 4}, {4, 0}});
  EXPECT_EQ(degree(b), Vector::Constant(2, 4.0));
  EXPECT_EQ(normalized_laplacian(b, degree(b)), a);
}

TEST(Laplacian, PreservesBlockStructure) {
  const Matrix a = block_affinity({3, 2}, 0.0);
  const Matrix l = normalized_laplacian(a, degree(a));
  EXPECT_EQ(l.block(0, 3, 3, 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(l.block(3, 0, 2, 3).cwiseAbs().maxCoeff(), 0.0);
}

TEST(RandomWalk, Examples) {
  const Matrix a = from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(random_walk_matrix(a, degree(a)), a);
  const Matrix b = from_rows({{0, 2, 2}, {2, 0, 0}, {2, 0, 0}});
  const Matrix p = random_walk_matrix(b, degree(b));
  EXPECT_EQ(p.row(0), (Eigen::RowVector3d(0, 0.5, 0.5)));
}

TEST(RandomWalk, RowsSumToOne) {
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(10));
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = 0;
      for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.01 + rng.uniform();
    }
    const Matrix p = random_walk_matrix(a, degree(a));
    for (Eigen::Index i = 0; i < n; ++i) EXPECT_NEAR(p.row(i).sum(), 1.0, 1e-14);
  }
}

TEST(Eigen, IdentityAndDiagonal) {
  const auto id = top_eigenpairs(Matrix::Identity(3, 3), 2);
  EXPECT_NEAR(id.values[0], 1.0, 1e-14);
  EXPECT_NEAR(id.values[1], 1.0, 1e-14);

  const Matrix d = Vector((Vector(3) << 3, 2, 1).finished()).asDiagonal();
  const auto p = top_eigenpairs(d, 2);
  EXPECT_NEAR(p.values[0], 3.0, 1e-14);
  EXPECT_NEAR(p.values[1], 2.0, 1e-14);
  EXPECT_NEAR(p.vectors(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(p.vectors(1, 1), 1.0, 1e-14);
}

TEST(Eigen, MatchesJacobiOracle) {
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const Eigen::Index n = 5;
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i; j < n; ++j) m(i, j) = m(j, i) = rng.normal();
    }
    const auto got = top_eigenpairs(m, 3);
    const auto want = oracle::jacobi_eigen(to_dense(m));
    for (int c = 0; c < 3; ++c) {
      EXPECT_NEAR(got.values[c], want.values[static_cast<std::size_t>(c)], 1e-8);
      for (Eigen::Index i = 0; i < n; ++i) {
        EXPECT_NEAR(got.vectors(i, c), want.vectors[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)], 1e-6);
      }
    }
  }
}

TEST(Eigen, RejectsBadRequests) {
  EXPECT_THROW(top_eigenpairs(Matrix::Identity(3, 3), 4), Error);
  EXPECT_THROW(top_eigenpairs(Matrix::Identity(3, 3), 0), Error);
  EXPECT_THROW(top_eigenpairs(from_rows({{0, 1}, {2, 0}}), 1), Error);
}

TEST(Eigen, SignFixedLargestComponentPositive) {
  Vector v(3);
  v << 0.1, -0.9, 0.3;
  fix_sign(v);
  EXPECT_GT(v[1], 0.0);
  EXPECT_LT(v[0], 0.0);
}

TEST(NJW, PerfectTwoBlocks) {
  std::vector<std::size_t> truth;
  const Matrix a = block_affinity({4, 3}, 0.0, &truth);
  const auto r = njw_cluster(a, 2, 1);
  EXPECT_EQ(variation_of_information(r.clustering.assignment, truth), 0.0);
  EXPECT_EQ(r.clustering.method, "spectral-njw");
  EXPECT_EQ(r.embedding.rows(), 7);
  EXPECT_EQ(r.embedding.cols(), 2);
  for (Eigen::Index i = 0; i < 7; ++i) EXPECT_NEAR(r.embedding.row(i).norm(), 1.0, 1e-12);
}

TEST(NJW, ThreeCliquesMaximizeWithinAffinity) {
  std::vector<std::size_t> truth;
  const Matrix a = block_affinity({3, 3, 3}, 1e-6, &truth);
  const auto dense = to_dense(a);
  double best = -1;
  oracle::for_each_partition(9, 3, [&](const std::vector<std::size_t>& p) {
    best = std::max(best, oracle::within_weight(dense, p));
  });
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = njw_cluster(a, 3, seed);
    EXPECT_NEAR(oracle::within_weight(dense, r.clustering.assignment), best, 1e-12);
    EXPECT_TRUE(oracle::same_partition(r.clustering.assignment, truth));
  }
}

TEST(NJW, KEqualsNGivesSingletons) {
  Rng rng(8);
  const Eigen::Index n = 6;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.1 + rng.uniform();
  }
  const auto r = njw_cluster(a, 6, 5);
  auto sizes = r.clustering.sizes();
  for (auto s : sizes) EXPECT_EQ(s, 1u);
}

TEST(NJW, IsolatedVertexRejected) {
  Matrix a = block_affinity({3, 3}, 0.0);
  a.conservativeResize(7, 7);
  a.row(6).setZero();
  a.col(6).setZero();
  EXPECT_THROW(njw_cluster(a, 2, 1), DisconnectedVertexError);
}

TEST(NJW, InvalidAffinityRejected) {
  Matrix a = block_affinity({2, 2}, 0.1);
  a(0, 0) = 1.0;
  EXPECT_THROW(njw_cluster(a, 2, 1), Error);
  Matrix b = block_affinity({2, 2}, 0.1);
  b(0, 1) = -1.0;
  b(1, 0) = -1.0;
  EXPECT_THROW(njw_cluster(b, 2, 1), Error);
  EXPECT_THROW(njw_cluster(block_affinity({2, 2}, 0.1), 1, 1), Error);
}

TEST(ModifiedNcut, PerfectTwoBlocksSplitBySign) {
  std::vector<std::size_t> truth;
  const Matrix a = block_affinity({4, 3}, 0.0, &truth);
  const auto r = modified_ncut_cluster(a, 2, 1);
  EXPECT_TRUE(oracle::same_partition(r.clustering.assignment, truth));
  ASSERT_EQ(r.embedding.cols(), 1);
  for (Eigen::Index i = 0; i < 7; ++i) {
    for (Eigen::Index j = 0; j < 7; ++j) {
      const bool same = truth[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(j)];
      EXPECT_EQ(r.embedding(i, 0) * r.embedding(j, 0) > 0, same);
    }
  }
}

TEST(ModifiedNcut, AgreesWithNJWOnCliques) {
  std::vector<std::size_t> truth;
  const Matrix a = block_affinity({3, 3, 3}, 1e-6, &truth);
  const auto m = modified_ncut_cluster(a, 3, 7);
  const auto n = njw_cluster(a, 3, 7);
  EXPECT_TRUE(oracle::same_partition(m.clustering.assignment, truth));
  EXPECT_EQ(variation_of_information(m.clustering.assignment, n.clustering.assignment), 0.0);
}

TEST(ModifiedNcut, EmbeddingSolvesRandomWalkEigenproblem) {
  Rng rng(21);
  const Eigen::Index n = 8;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.uniform();
  }
  const auto r = modified_ncut_cluster(a, 4, 1);
  const Matrix p = random_walk_matrix(a, degree(a));
  ASSERT_EQ(r.embedding.cols(), 3);
  for (Eigen::Index c = 0; c < 3; ++c) {
    const Vector x = r.embedding.col(c);
    EXPECT_LT((p * x - r.eigenvalues[c] * x).norm(), 1e-9);
    EXPECT_LT(r.eigenvalues[c], 1.0 - 1e-9);
  }
}

TEST(ModifiedNcut, LeadingRandomWalkVectorIsConstant) {
  Rng rng(2);
  const Eigen::Index n = 6;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) = 0;
    for (Eigen::Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.2 + rng.uniform();
  }
  const Vector d = degree(a);
  const auto top = top_eigenpairs(normalized_laplacian(a, d), 1);
  EXPECT_NEAR(top.values[0], 1.0, 1e-12);
  const Vector x = d.cwiseSqrt().cwiseInverse().cwiseProduct(top.vectors.col(0));
  EXPECT_LT((x.array() - x[0]).abs().maxCoeff(), 1e-12);
}

TEST(ModifiedNcut, InvariantToAffinityScale) {
  std::vector<std::size_t> truth;
  Rng rng(6);
  Matrix a = block_affinity({4, 4, 4}, 0.05, &truth);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) a(i, j) = a(j, i) = a(i, j) * (0.5 + rng.uniform());
  }
  const auto r1 = modified_ncut_cluster(a, 3, 3);
  const auto r2 = modified_ncut_cluster(Matrix(a * 37.5), 3, 3);
  EXPECT_EQ(r1.clustering.assignment, r2.clustering.assignment);
  const auto n1 = njw_cluster(a, 3, 3);
  const auto n2 = njw_cluster(Matrix(a * 0.01), 3, 3);
  EXPECT_EQ(n1.clustering.assignment, n2.clustering.assignment);
}

TEST(Ncut, Examples) {
  const Matrix two = block_affinity({2, 2}, 0.0);
  const bool split[] = {true, true, false, false};
  const auto m = ncut_measure(two, split);
  EXPECT_EQ(m.ncut, 0.0);
  EXPECT_EQ(m.nassoc, 2.0);

  const Matrix path = from_rows({{0, 1}, {1, 0}});
  const bool one[] = {true, false};
  const auto p = ncut_measure(path, one);
  EXPECT_EQ(p.ncut, 2.0);
  EXPECT_EQ(p.nassoc, 0.0);
}

TEST(Ncut, DegenerateSplitsRejected) {
  const Matrix two = block_affinity({2, 2}, 0.0);
  const bool all[] = {true, true, true, true};
  EXPECT_THROW(ncut_measure(two, all), Error);
  Matrix iso = Matrix::Zero(3, 3);
  iso(0, 1) = iso(1, 0) = 1;
  const bool lone[] = {false, false, true};
  EXPECT_THROW(ncut_measure(iso, lone), Error);
}
