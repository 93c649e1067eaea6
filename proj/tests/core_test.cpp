#include <gtest/gtest.h>

#include <cmath>

#include "got/core.hpp"
#include "test_util.hpp"

namespace got {
namespace {

using testing::Rng;

TEST(CosineSimilarity, OrthonormalSelfSimilarityIsIdentity) {
  EmbeddingSet a({{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_EQ(cosine_similarity_matrix(a, a), Matrix::identity(2));
}

TEST(CosineSimilarity, FortyFiveDegrees) {
  EmbeddingSet a({{1.0, 0.0}});
  EmbeddingSet b({{1.0, 1.0}});
  EXPECT_NEAR(cosine_similarity_matrix(a, b)(0, 0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CosineSimilarity, MatchesScalarReference) {
  Rng rng(11);
  const Matrix a = testing::gaussian_matrix(5, 8, rng);
  const Matrix b = testing::gaussian_matrix(5, 8, rng);
  const Matrix got = cosine_similarity_matrix(EmbeddingSet(a), EmbeddingSet(b));
  const Matrix ref = testing::scalar_cosine(a, b);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(got(i, j), ref(i, j), 1e-12);
      EXPECT_LE(std::abs(got(i, j)), 1.0);
    }
}

TEST(CosineSimilarity, RejectsDimensionMismatch) {
  EmbeddingSet a({{1.0, 0.0}});
  EmbeddingSet b({{1.0, 0.0, 0.0}});
  EXPECT_THROW(cosine_similarity_matrix(a, b), InvalidArgument);
}

TEST(EmbeddingSet, RejectsZeroNormWithIndex) {
  try {
    EmbeddingSet bad({{1.0, 2.0}, {0.0, 0.0}});
    FAIL() << "zero-norm vector accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("vector 1"), std::string::npos) << e.what();
  }
}

TEST(EmbeddingSet, RejectsRaggedAndEmpty) {
  EXPECT_THROW(EmbeddingSet(std::vector<std::vector<double>>{{1.0, 2.0}, {1.0}}),
               InvalidArgument);
  EXPECT_THROW(EmbeddingSet(std::vector<std::vector<double>>{}), InvalidArgument);
}

TEST(CosineCost, ZeroSelfDistanceAndAntipodalMaximum) {
  EmbeddingSet a({{0.3, -1.2, 2.0}});
  EXPECT_NEAR(cosine_cost_matrix(a, a)(0, 0), 0.0, 1e-15);

  EmbeddingSet u({{1.0, 0.0}});
  EmbeddingSet v({{-1.0, 0.0}});
  EXPECT_EQ(cosine_cost_matrix(u, v)(0, 0), 2.0);
}

TEST(CosineCost, IsOneMinusSimilarity) {
  Rng rng(12);
  const auto a = testing::random_embeddings(4, 6, rng);
  const auto b = testing::random_embeddings(6, 6, rng);
  const Matrix s = cosine_similarity_matrix(a, b);
  const CostMatrix c = cosine_cost_matrix(a, b);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(c(i, j), 1.0 - s(i, j));
      EXPECT_GE(c(i, j), 0.0);
      EXPECT_LE(c(i, j), 2.0);
    }
}

TEST(CosineCost, ScaleInvariant) {
  Rng rng(13);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix a = testing::gaussian_matrix(5, 7, rng);
    const Matrix b = testing::gaussian_matrix(4, 7, rng);
    const Matrix before = cosine_cost_matrix(EmbeddingSet(a), EmbeddingSet(b)).entries();
    const double s = scale(rng);
    for (double& v : a.row(trial % 5)) v *= s;
    const Matrix after = cosine_cost_matrix(EmbeddingSet(a), EmbeddingSet(b)).entries();
    EXPECT_LE(max_abs_diff(before, after), 1e-9);
  }
}

TEST(CosineSimilarity, SelfSimilaritySymmetricUnitDiagonal) {
  Rng rng(14);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_embeddings(2 + trial % 7, 3 + trial % 5, rng);
    const Matrix s = cosine_similarity_matrix(a, a);
    for (std::size_t i = 0; i < s.rows(); ++i) {
      EXPECT_NEAR(s(i, i), 1.0, 1e-9);
      for (std::size_t j = 0; j < s.cols(); ++j) EXPECT_NEAR(s(i, j), s(j, i), 1e-9);
    }
  }
}

TEST(BuildGraph, OrthonormalPair) {
  EmbeddingSet a({{1.0, 0.0}, {0.0, 1.0}});
  const SimilarityMatrix g = build_graph(a, 0.1);
  EXPECT_NEAR(g(0, 0), 0.9, 1e-15);
  EXPECT_NEAR(g(1, 1), 0.9, 1e-15);
  EXPECT_EQ(g(0, 1), 0.0);
  EXPECT_EQ(g(1, 0), 0.0);
  EXPECT_TRUE(g.thresholded());
  EXPECT_EQ(g.tau(), 0.1);
  EXPECT_FALSE(g.has_edge(0, 1));
}

TEST(BuildGraph, ZeroTauClampsNegativeSimilarities) {
  Rng rng(15);
  const auto a = testing::random_embeddings(6, 3, rng);
  const Matrix raw = cosine_similarity_matrix(a, a);
  const SimilarityMatrix g = build_graph(a, 0.0);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_EQ(g(i, j), std::max(raw(i, j), 0.0));
}

TEST(BuildGraph, EdgeSetMatchesScalarReference) {
  Rng rng(16);
  const Matrix x = testing::gaussian_matrix(6, 4, rng);
  const Matrix ref = testing::scalar_cosine(x, x);
  const SimilarityMatrix g = build_graph(EmbeddingSet(x), 0.1);
  int edges = 0;
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(g.has_edge(i, j), ref(i, j) > 0.1) << i << "," << j;
      edges += g.has_edge(i, j) ? 1 : 0;
    }
  EXPECT_GT(edges, 6);  // more than the diagonal
}

TEST(BuildGraph, RejectsNegativeTau) {
  EmbeddingSet a({{1.0, 0.0}});
  EXPECT_THROW(build_graph(a, -0.1), InvalidArgument);
}

TEST(BuildGraph, BoundedByRawSimilarityAndMonotoneInTau) {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = testing::random_embeddings(7, 3, rng);
    const Matrix raw = cosine_similarity_matrix(a, a);
    Matrix prev = build_graph(a, 0.0).entries();
    for (double tau : {0.05, 0.1, 0.3, 0.7, 1.5}) {
      const Matrix g = build_graph(a, tau).entries();
      for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_GE(g.data()[k], 0.0);
        EXPECT_LE(g.data()[k], std::max(raw.data()[k], 0.0));
        EXPECT_LE(g.data()[k], prev.data()[k]);
      }
      prev = g;
    }
  }
}

TEST(Kernels, PermutationEquivariant) {
  Rng rng(18);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = testing::gaussian_matrix(6, 5, rng);
    const Matrix y = testing::gaussian_matrix(4, 5, rng);
    const Permutation px = testing::random_permutation(6, rng);
    const Permutation py = testing::random_permutation(4, rng);
    const Permutation all_y = identity_permutation(5);
    const Matrix xp = permute(x, px, all_y);
    const Matrix yp = permute(y, py, all_y);

    const Matrix c = cosine_cost_matrix(EmbeddingSet(x), EmbeddingSet(y)).entries();
    const Matrix cp = cosine_cost_matrix(EmbeddingSet(xp), EmbeddingSet(yp)).entries();
    EXPECT_EQ(cp, permute(c, px, py));

    const Matrix g = build_graph(EmbeddingSet(x), 0.1).entries();
    const Matrix gp = build_graph(EmbeddingSet(xp), 0.1).entries();
    EXPECT_EQ(gp, permute(g, px, px));
  }
}

TEST(UniformMarginal, Values) {
  const auto four = uniform_marginal(4);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(four[i], 0.25);
  EXPECT_EQ(uniform_marginal(1)[0], 1.0);
  const auto seven = uniform_marginal(7);
  double s = 0.0;
  for (double v : seven.values()) s += v;
  EXPECT_NEAR(s, 1.0, 1e-12);
  EXPECT_THROW(uniform_marginal(0), InvalidArgument);
}

TEST(MarginalWeights, RejectsNegativeOrUnnormalized) {
  EXPECT_THROW(MarginalWeights({0.5, 0.6}), InvalidArgument);
  EXPECT_THROW(MarginalWeights({1.5, -0.5}), InvalidArgument);
  EXPECT_NO_THROW(MarginalWeights({0.0, 1.0}));
}

TEST(SimilarityMatrix, RejectsAsymmetricAndNonSquare) {
  EXPECT_THROW(SimilarityMatrix(Matrix{{1.0, 0.2}, {0.3, 1.0}}), InvalidArgument);
  EXPECT_THROW(SimilarityMatrix(Matrix{{1.0, 0.2}}), InvalidArgument);
  EXPECT_THROW(SimilarityMatrix(Matrix{{1.0, -0.2}, {-0.2, 1.0}}, true, 0.1), InvalidArgument);
}

TEST(TransportPlan, ValidatesShapeSignAndMarginals) {
  const auto u = uniform_marginal(2);
  EXPECT_THROW(TransportPlan(Matrix(3, 2), u, u), InvalidArgument);
  EXPECT_THROW(TransportPlan(Matrix{{0.6, -0.1}, {0.0, 0.5}}, u, u), InvalidArgument);

  TransportPlan off(Matrix{{0.5, 0.0}, {0.25, 0.25}}, u, u);
  EXPECT_NEAR(off.marginal_violation(), 0.25, 1e-15);
  EXPECT_THROW(off.validate(1e-6), InvalidArgument);

  const TransportPlan perm = permutation_plan({1, 0});
  EXPECT_NO_THROW(perm.validate(1e-12));
  EXPECT_EQ(perm(0, 1), 0.5);
}

TEST(SolverConfig, Validation) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.tau, 0.1);
  EXPECT_EQ(c.lambda, 0.8);
  c.beta = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.lambda = 1.2;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.inner_iters = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = SolverConfig{};
  c.tau = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

}  // namespace
}  // namespace got
