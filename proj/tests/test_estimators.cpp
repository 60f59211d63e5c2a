#include <gtest/gtest.h>

#include <random>

#include "factorgroup/estimators.hpp"
#include "factorgroup/simlab.hpp"
#include "oracles.hpp"
#include "symmetric_eigen.hpp"

using namespace factorgroup;

namespace {

const double kLambdas[] = {0.0, 0.1, 1.0, 10.0, 1000.0};

}  // namespace

TEST(Shrink, IdentityAtZero) {
  std::mt19937_64 rng(1);
  const Matrix m = oracle::random_matrix(7, 3, rng);
  EXPECT_EQ(shrink_apply(ShrinkOperator(0.0, 7), m), m);
}

TEST(Shrink, OnesAreFixed) {
  for (double lambda : kLambdas) {
    const Matrix ones = Matrix::Ones(9, 1);
    EXPECT_LT(oracle::max_abs(shrink_apply(ShrinkOperator(lambda, 9), ones) - ones), 1e-14);
  }
}

TEST(Shrink, TwoByTwo) {
  Matrix expected(2, 2);
  expected << 0.75, 0.25, 0.25, 0.75;
  const Matrix got = shrink_apply(ShrinkOperator(1.0, 2), Matrix::Identity(2, 2));
  EXPECT_LT(oracle::max_abs(got - expected), 1e-15);
  EXPECT_LT(oracle::max_abs(oracle::dense_d_inverse(1.0, 2) - expected), 1e-15);
}

TEST(Shrink, MatchesDenseInverse) {
  std::mt19937_64 rng(2);
  for (Index n = 1; n <= 50; ++n) {
    const Matrix m = oracle::random_matrix(n, 4, rng);
    for (double lambda : kLambdas) {
      const Matrix reference = oracle::dense_d_inverse(lambda, n) * m;
      EXPECT_LT(oracle::max_abs(shrink_apply(ShrinkOperator(lambda, n), m) - reference), 1e-10)
          << "n=" << n << " lambda=" << lambda;
    }
  }
}

TEST(Shrink, RejectsBadInput) {
  EXPECT_FG_ERROR(ShrinkOperator(-1.0, 3), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(ShrinkOperator(kInfiniteLambda, 3), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(ShrinkOperator(std::nan(""), 3), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(shrink_apply(ShrinkOperator(1.0, 3), Matrix::Ones(4, 1)), ErrorCode::DimensionMismatch);
}

TEST(Eigen, TopPairsMatchDenseSolver) {
  std::mt19937_64 rng(3);
  for (Index n : {3, 12, 40, 90, 160}) {
    for (int count : {1, 2, 4}) {
      if (count > n) continue;
      const Matrix x = oracle::random_matrix(n, n / 2 + 1, rng);
      const Matrix g = detail::gram(x);
      const auto top = detail::top_eigenpairs(g, count);
      Eigen::SelfAdjointEigenSolver<Matrix> es(g);
      const double scale = es.eigenvalues()(n - 1);
      for (int j = 0; j < count; ++j) {
        EXPECT_NEAR(top.values(j), es.eigenvalues()(n - 1 - j), 1e-12 * scale);
        const double align = std::abs(top.vectors.col(j).dot(es.eigenvectors().col(n - 1 - j)));
        EXPECT_NEAR(align, 1.0, 1e-9) << "n=" << n << " j=" << j;
      }
      EXPECT_LT(oracle::max_abs(top.vectors.transpose() * top.vectors - Matrix::Identity(count, count)), 1e-13);
    }
  }
}

TEST(Eigen, RepeatedEigenvaluesStayOrthonormal) {
  Matrix g = Matrix::Identity(60, 60);
  g(5, 5) = 3.0;
  const auto top = detail::top_eigenpairs(g, 4);
  EXPECT_NEAR(top.values(0), 3.0, 1e-14);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(top.values(j), 1.0, 1e-14);
  EXPECT_LT(oracle::max_abs(top.vectors.transpose() * top.vectors - Matrix::Identity(4, 4)), 1e-13);
  EXPECT_LT(oracle::max_abs(g * top.vectors - top.vectors * top.values.asDiagonal()), 1e-13);
}

TEST(Pca, RecoversExactRankOne) {
  const Index t = 8, n = 5;
  Vector f(t);
  for (Index i = 0; i < t; ++i) f(i) = (i % 2 == 0) ? 1.0 : -1.0;
  Vector b(n);
  b << 0.5, -1.0, 2.0, 0.25, 1.5;
  const Matrix x = f * b.transpose();
  const FactorFit fit = pca_fit(x, 1);
  EXPECT_LT(oracle::max_abs(common_components(fit).c - x), 1e-10);
  EXPECT_EQ(fit.method, FitMethod::PCA);
  EXPECT_EQ(fit.lambda, 0.0);
}

TEST(Pca, SmallIntegerPanelAgainstDenseEigensolver) {
  Matrix x(4, 3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 3; ++j) x(i, j) = i + j;
  for (int r = 1; r <= 2; ++r) {
    const FactorFit fit = pca_fit(x, r);
    const auto ref = oracle::ppca_reference(x, r, 0.0);
    EXPECT_LT(oracle::max_abs(fit.scores - ref.scores), 1e-10);
    EXPECT_LT(oracle::max_abs(common_components(fit).c - ref.scores * ref.loadings.transpose()), 1e-10);
    EXPECT_LT(oracle::max_abs(common_components(fit).c - oracle::svd_common(x, r)), 1e-10);
  }
  // i + j has rank 2
  EXPECT_FG_ERROR(pca_fit(x, 3), ErrorCode::RankDeficient);
}

TEST(Pca, RejectsBadRank) {
  const Matrix x = Matrix::Random(5, 4);
  EXPECT_FG_ERROR(pca_fit(x, 0), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(pca_fit(x, 5), ErrorCode::InvalidArgument);
}

TEST(Pca, SignConvention) {
  std::mt19937_64 rng(4);
  const Matrix x = oracle::random_matrix(30, 20, rng);
  const FactorFit fit = pca_fit(x, 3);
  for (Index j = 0; j < 3; ++j) {
    Index best = 0;
    fit.scores.col(j).cwiseAbs().maxCoeff(&best);
    EXPECT_GT(fit.scores(best, j), 0.0);
  }
  for (Index j = 1; j < 3; ++j) EXPECT_GT(fit.eigenvalues(j - 1), fit.eigenvalues(j));
}

TEST(Ppca, ZeroPenaltyIsPca) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = oracle::random_matrix(25 + trial, 15 + trial, rng);
    const FactorFit a = pca_fit(x, 3);
    const FactorFit b = ppca_fit(x, 3, 0.0);
    EXPECT_LT(oracle::max_abs(a.scores - b.scores), 1e-10);
    EXPECT_LT(oracle::max_abs(a.loadings - b.loadings), 1e-10);
    EXPECT_EQ(b.method, FitMethod::PPCA);
  }
}

TEST(Ppca, MatchesDenseReference) {
  std::mt19937_64 rng(6);
  for (double lambda : kLambdas) {
    const Matrix x = oracle::random_matrix(18, 12, rng);
    const FactorFit fit = ppca_fit(x, 2, lambda);
    const auto ref = oracle::ppca_reference(x, 2, lambda);
    EXPECT_LT(oracle::max_abs(fit.scores - ref.scores), 1e-8) << lambda;
    EXPECT_LT(oracle::max_abs(fit.loadings - ref.loadings), 1e-8) << lambda;
    EXPECT_LT((fit.eigenvalues - ref.eigenvalues).cwiseAbs().maxCoeff(), 1e-9 * ref.eigenvalues(0));
  }
}

TEST(Ppca, IdentificationForEveryLambda) {
  std::mt19937_64 rng(7);
  const Matrix x = oracle::random_matrix(40, 30, rng);
  for (double lambda : {0.0, 0.5, 3.0, 30.0, 1e6}) {
    const FactorFit fit = ppca_fit(x, 4, lambda);
    EXPECT_LT(oracle::max_abs(fit.scores.transpose() * fit.scores / 40.0 - Matrix::Identity(4, 4)), 1e-10);
  }
}

TEST(Ppca, HugePenaltyHomogenizesLoadings) {
  std::mt19937_64 rng(8);
  const Matrix x = oracle::random_matrix(20, 10, rng);
  const FactorFit fit = ppca_fit(x, 1, 1e12);
  // limit: D^{-1} -> 1 1^T / N
  const Matrix limit = Matrix::Ones(10, 10) / 10.0 * x.transpose() * fit.scores / 20.0;
  EXPECT_LT(oracle::max_abs(fit.loadings - limit), 1e-6 * fit.loadings.norm());
  const double spread = fit.loadings.maxCoeff() - fit.loadings.minCoeff();
  EXPECT_LT(spread, 1e-6 * fit.loadings.norm());
}

TEST(Ppca, ClosedFormLoadingsMinimizeObjective) {
  std::mt19937_64 rng(9);
  const Matrix x = oracle::random_matrix(6, 4, rng);
  const double lambda = 0.5;
  const FactorFit fit = ppca_fit(x, 2, lambda);
  const double best = penalized_objective(x, fit.scores, fit.loadings, lambda);
  for (int k = 0; k < 100; ++k) {
    const Matrix delta = oracle::random_matrix(4, 2, rng, 0.1);
    EXPECT_LE(best, penalized_objective(x, fit.scores, fit.loadings + delta, lambda));
  }
  const FactorFit pca = pca_fit(x, 2);
  EXPECT_LE(best, penalized_objective(x, pca.scores, pca.loadings, lambda) + 1e-12);
}

TEST(Ppca, ObjectiveMatchesDenseFormula) {
  std::mt19937_64 rng(10);
  const Matrix x = oracle::random_matrix(7, 5, rng);
  const Matrix f = oracle::random_matrix(7, 2, rng);
  const Matrix b = oracle::random_matrix(5, 2, rng);
  const double lambda = 1.7;
  const Matrix pi = Matrix::Identity(5, 5) - Matrix::Ones(5, 5) / 5.0;
  const double expected = (x - f * b.transpose()).squaredNorm() / 35.0 +
                          lambda / 5.0 * (b.transpose() * pi * b).trace();
  EXPECT_NEAR(penalized_objective(x, f, b, lambda), expected, 1e-12);
}

TEST(Ppca, ColumnScalingScalesLoadings) {
  std::mt19937_64 rng(12);
  const Matrix x = oracle::random_matrix(30, 12, rng);
  const FactorFit a = ppca_fit(x, 2, 2.0);
  const FactorFit b = ppca_fit(3.5 * x, 2, 2.0);
  EXPECT_LT(oracle::max_abs(b.loadings - 3.5 * a.loadings), 1e-9);
  EXPECT_LT(subspace_distance(a.scores, b.scores), 1e-8);
}

TEST(Ppca, ColumnPermutationKeepsEigenvalues) {
  std::mt19937_64 rng(13);
  const Matrix x = oracle::random_matrix(25, 10, rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(10);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + 10, rng);
  const FactorFit a = ppca_fit(x, 3, 1.0);
  const FactorFit b = ppca_fit(x * perm, 3, 1.0);
  EXPECT_LT((a.eigenvalues - b.eigenvalues).cwiseAbs().maxCoeff(), 1e-10 * a.eigenvalues(0));
}

TEST(CommonComponents, Basics) {
  FactorFit fit;
  fit.scores = Matrix::Ones(3, 1);
  fit.loadings = Matrix::Constant(4, 1, 2.0);
  fit.r = 1;
  EXPECT_EQ(common_components(fit).c, Matrix::Constant(3, 4, 2.0));

  std::mt19937_64 rng(14);
  fit.scores = oracle::random_matrix(3, 2, rng);
  fit.loadings = oracle::random_matrix(3, 2, rng);
  fit.r = 2;
  const Matrix c = common_components(fit).c;
  for (int t = 0; t < 3; ++t)
    for (int i = 0; i < 3; ++i) {
      double sum = 0.0;
      for (int l = 0; l < 2; ++l) sum += fit.loadings(i, l) * fit.scores(t, l);
      EXPECT_NEAR(c(t, i), sum, 1e-14);
    }
}

TEST(OracleLambda, Values) {
  EXPECT_EQ(oracle_lambda(Matrix::Constant(5, 2, 1.3), 10), kInfiniteLambda);
  Matrix b(2, 1);
  b << 1, -1;
  EXPECT_NEAR(oracle_lambda(b, 10), 0.1, 1e-15);
  std::mt19937_64 rng(15);
  const Matrix loadings = oracle::random_matrix(9, 2, rng);
  Matrix shifted = loadings;
  shifted.rowwise() += Eigen::RowVector2d(4.0, -2.5);
  EXPECT_NEAR(oracle_lambda(loadings, 50), oracle_lambda(shifted, 50), 1e-12);
}
