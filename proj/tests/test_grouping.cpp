#include <gtest/gtest.h>

#include <random>

#include "factorgroup/estimators.hpp"
#include "factorgroup/grouping.hpp"
#include "factorgroup/refit.hpp"
#include "oracles.hpp"

using namespace factorgroup;

namespace {

Matrix orthonormal_scores(Index t, int r, std::mt19937_64& rng) {
  const Matrix raw = oracle::random_matrix(t, r, rng);
  Eigen::HouseholderQR<Matrix> qr(raw);
  return std::sqrt(static_cast<double>(t)) * (qr.householderQ() * Matrix::Identity(t, r));
}

DistanceMatrix random_distances(Index n, std::mt19937_64& rng, bool integer) {
  Matrix d = Matrix::Zero(n, n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) d(i, j) = d(j, i) = integer ? std::floor(4 * unif(rng)) : unif(rng);
  return DistanceMatrix(d);
}

}  // namespace

TEST(LoadingDistances, Values) {
  EXPECT_EQ(loading_distances(Matrix::Constant(4, 3, 2.5)).values(), Matrix::Zero(4, 4));
  Matrix b(2, 2);
  b << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(loading_distances(b)(0, 1), 1.0);
  EXPECT_FG_ERROR(loading_distances(Matrix::Ones(1, 2)), ErrorCode::InvalidArgument);
}

TEST(LoadingDistances, TriangleInequality) {
  std::mt19937_64 rng(1);
  const DistanceMatrix d = loading_distances(oracle::random_matrix(12, 3, rng));
  for (Index i = 0; i < 12; ++i)
    for (Index j = 0; j < 12; ++j)
      for (Index k = 0; k < 12; ++k) EXPECT_LE(d(i, k), d(i, j) + d(j, k) + 1e-14);
}

TEST(Ahc, HandTrace) {
  Matrix d(3, 3);
  d << 0, 1, 5, 1, 0, 4, 5, 4, 0;
  const AhcPath path = ahc_complete_linkage(DistanceMatrix(d));
  EXPECT_EQ(path.at(2).assignment(), (std::vector<int>{1, 1, 2}));
  ASSERT_EQ(path.merge_log.size(), 2u);
  EXPECT_EQ(path.merge_log[0].group_a, 1);
  EXPECT_EQ(path.merge_log[0].group_b, 2);
  EXPECT_EQ(path.merge_log[0].distance, 1.0);
  EXPECT_EQ(path.merge_log[1].distance, 5.0);
  EXPECT_EQ(path.at(1).k(), 1);
  EXPECT_EQ(path.at(3).k(), 3);
}

TEST(Ahc, EqualDistancesMergeLowestPair) {
  Matrix d = Matrix::Ones(5, 5) - Matrix::Identity(5, 5);
  const AhcPath path = ahc_complete_linkage(DistanceMatrix(d));
  EXPECT_EQ(path.merge_log[0].group_a, 1);
  EXPECT_EQ(path.merge_log[0].group_b, 2);
  EXPECT_EQ(path.merge_log[1].group_a, 1);
  EXPECT_EQ(path.merge_log[1].group_b, 3);
  EXPECT_EQ(path.at(4).assignment(), (std::vector<int>{1, 1, 2, 3, 4}));
}

TEST(Ahc, BlockDistances) {
  Matrix d = Matrix::Zero(6, 6);
  const std::vector<int> block = {0, 1, 0, 1, 1, 0};
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) d(i, j) = block[i] == block[j] ? 0.0 : 1.0;
  const AhcPath path = ahc_complete_linkage(DistanceMatrix(d));
  EXPECT_EQ(path.at(2), partition_from_assignment(block));
}

TEST(Ahc, MatchesNaiveImplementation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 60; ++trial) {
    const Index n = 2 + static_cast<Index>(trial % 15);
    const DistanceMatrix d = random_distances(n, rng, trial % 2 == 0);
    const AhcPath path = ahc_complete_linkage(d);
    const auto naive = oracle::naive_complete_linkage(d.values());
    ASSERT_EQ(path.n(), n);
    for (int k = 1; k <= n; ++k) {
      EXPECT_EQ(path.at(k), partition_from_assignment(naive[static_cast<std::size_t>(k - 1)]))
          << "trial " << trial << " K=" << k;
    }
  }
}

TEST(Ahc, NestedPath) {
  std::mt19937_64 rng(3);
  const DistanceMatrix d = random_distances(20, rng, false);
  const AhcPath path = ahc_complete_linkage(d);
  for (int k = 20; k >= 2; --k) {
    const auto& fine = path.at(k).assignment();
    const auto& coarse = path.at(k - 1).assignment();
    EXPECT_EQ(path.at(k).k(), k);
    // every fine group sits inside one coarse group
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j)
        if (fine[i] == fine[j]) EXPECT_EQ(coarse[i], coarse[j]);
  }
}

TEST(Ahc, RelabelingInvariance) {
  std::mt19937_64 rng(4);
  const Index n = 14;
  const DistanceMatrix d = random_distances(n, rng, false);
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix permuted(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) permuted(i, j) = d(perm[i], perm[j]);
  const AhcPath a = ahc_complete_linkage(d);
  const AhcPath b = ahc_complete_linkage(DistanceMatrix(permuted));
  for (int k = 1; k <= n; ++k) {
    std::vector<int> mapped(n);
    for (Index i = 0; i < n; ++i) mapped[i] = a.at(k).assignment()[perm[i]];
    EXPECT_EQ(b.at(k), partition_from_assignment(mapped));
  }
}

TEST(GoodnessOfFit, ExactGroupModelIsZero) {
  std::mt19937_64 rng(5);
  const Matrix f = orthonormal_scores(30, 2, rng);
  const std::vector<int> truth = {1, 1, 2, 2, 3, 3, 1};
  const Matrix groups = oracle::random_matrix(3, 2, rng);
  Matrix b(7, 2);
  for (int i = 0; i < 7; ++i) b.row(i) = groups.row(truth[i] - 1);
  EXPECT_LT(goodness_of_fit(f * b.transpose(), f, partition_from_assignment(truth)), 1e-25);
}

TEST(GoodnessOfFit, SingletonsGiveUnrestrictedResidual) {
  std::mt19937_64 rng(6);
  const Matrix x = oracle::random_matrix(25, 6, rng);
  const FactorFit fit = pca_fit(x, 2);
  const Partition singles = partition_from_assignment({1, 2, 3, 4, 5, 6});
  const Matrix ols = x.transpose() * fit.scores / 25.0;
  const double expected = (x - fit.scores * ols.transpose()).squaredNorm() / 150.0;
  EXPECT_NEAR(goodness_of_fit(x, fit.scores, singles), expected, 1e-13);
}

TEST(GoodnessOfFit, OneGroupDoubleLoop) {
  std::mt19937_64 rng(7);
  const Matrix x = oracle::random_matrix(10, 4, rng);
  const FactorFit fit = pca_fit(x, 2);
  double b0 = 0, b1 = 0;
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 10; ++t) {
      b0 += fit.scores(t, 0) * x(t, i);
      b1 += fit.scores(t, 1) * x(t, i);
    }
  b0 /= 40.0;
  b1 /= 40.0;
  double sum = 0;
  for (int i = 0; i < 4; ++i)
    for (int t = 0; t < 10; ++t) {
      const double e = x(t, i) - b0 * fit.scores(t, 0) - b1 * fit.scores(t, 1);
      sum += e * e;
    }
  EXPECT_NEAR(goodness_of_fit(x, fit.scores, partition_from_assignment({1, 1, 1, 1})), sum / 40.0, 1e-13);
}

TEST(Rho, Values) {
  EXPECT_NEAR(rho_default(100, 250), std::log(100.0) / 100.0, 1e-15);
  EXPECT_NEAR(rho_default(100, 250), 0.046052, 1e-6);
  EXPECT_EQ(rho_default(40, 40), std::log(40.0) / 40.0);
  EXPECT_EQ(rho_default(30, 70), rho_default(70, 30));
  EXPECT_FG_ERROR(rho_default(1, 100), ErrorCode::DegenerateGroup);
  const double r = rho_default(2, 2);
  EXPECT_GT(r, 0.0);
  EXPECT_LT(r, 1.0);
}

TEST(SelectGroupCount, NoiselessThreeGroups) {
  std::mt19937_64 rng(8);
  const Index t = 60, n = 30;
  const Matrix f = orthonormal_scores(t, 2, rng);
  Matrix groups(3, 2);
  groups << 2, 0, 0, 2, 2.4, 3.2;
  Matrix b(n, 2);
  std::vector<int> truth(n);
  for (Index i = 0; i < n; ++i) {
    truth[i] = static_cast<int>(i % 3) + 1;
    b.row(i) = groups.row(i % 3);
  }
  const Matrix x = f * b.transpose() + 1e-6 * oracle::random_matrix(t, n, rng);
  const FactorFit fit = pca_fit(x, 2);
  const AhcPath path = ahc_complete_linkage(loading_distances(fit.loadings));
  const GroupSelectionReport report = select_group_count(x, fit.scores, path, 15);
  EXPECT_EQ(report.k_hat, 3);
  EXPECT_EQ(path.at(3), partition_from_assignment(truth));
  ASSERT_EQ(report.ic_values.size(), 15u);
  for (std::size_t k = 0; k < 15; ++k) {
    EXPECT_NEAR(report.ic_values[k], std::log(report.s_values[k]) + (k + 1) * report.rho_values[k], 1e-12);
  }
}

TEST(SelectGroupCount, SingleGroupPanel) {
  std::mt19937_64 rng(9);
  const Index t = 100, n = 40;
  const Matrix f = orthonormal_scores(t, 1, rng);
  const Matrix x = f * Matrix::Constant(1, n, 1.5) + 0.5 * oracle::random_matrix(t, n, rng);
  const FactorFit fit = pca_fit(x, 1);
  const AhcPath path = ahc_complete_linkage(loading_distances(fit.loadings));
  EXPECT_EQ(select_group_count(x, fit.scores, path, 10).k_hat, 1);
}

TEST(SelectGroupCount, KBarOneAndErrors) {
  std::mt19937_64 rng(10);
  const Matrix x = oracle::random_matrix(20, 8, rng);
  const FactorFit fit = pca_fit(x, 2);
  const AhcPath path = ahc_complete_linkage(loading_distances(fit.loadings));
  EXPECT_EQ(select_group_count(x, fit.scores, path, 1).k_hat, 1);
  EXPECT_FG_ERROR(select_group_count(x, fit.scores, path, 0), ErrorCode::InvalidArgument);
  EXPECT_FG_ERROR(select_group_count(x, fit.scores, path, 9), ErrorCode::InvalidArgument);
  const AhcPath short_path = ahc_complete_linkage(loading_distances(fit.loadings.topRows(5)));
  EXPECT_FG_ERROR(select_group_count(x, fit.scores, short_path, 3), ErrorCode::DimensionMismatch);
}

TEST(SelectGroupCount, ZeroResidualIsReported) {
  Matrix f(4, 1);
  f << 1, -1, 1, -1;
  const Matrix x = f * Matrix::Constant(1, 4, 2.0);
  const Matrix d = Matrix::Ones(4, 4) - Matrix::Identity(4, 4);
  const AhcPath path = ahc_complete_linkage(DistanceMatrix(d));
  EXPECT_FG_ERROR(select_group_count(x, f, path, 2), ErrorCode::ZeroResidual);
}

TEST(SelectGroupCount, ResidualNonIncreasingAlongPath) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = oracle::random_matrix(30, 15, rng);
    const FactorFit fit = ppca_fit(x, 2, 0.3 * trial);
    const AhcPath path = ahc_complete_linkage(loading_distances(fit.loadings));
    const auto report = select_group_count(x, fit.scores, path, 15);
    for (std::size_t k = 1; k < 15; ++k) EXPECT_LE(report.s_values[k], report.s_values[k - 1] * (1 + 1e-12));
  }
}
