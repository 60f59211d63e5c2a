#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup {

/// Inverse of D = I + lambda * (N*I - 1 1^T) / N, kept in closed form:
///   D^{-1} = (1/(1+lambda)) I + (lambda / ((1+lambda) N)) 1 1^T.
/// The N x N matrix is never formed.
class ShrinkOperator {
 public:
  ShrinkOperator(double lambda, Index n);

  double lambda() const noexcept { return lambda_; }
  Index n() const noexcept { return n_; }

  /// D^{-1} * m in O(N * m.cols()).
  Matrix apply(const Eigen::Ref<const Matrix>& m) const;

 private:
  double lambda_;
  Index n_;
};

Matrix shrink_apply(const ShrinkOperator& op, const Eigen::Ref<const Matrix>& m);

/// Conventional PCA: scores are sqrt(T) times the leading r eigenvectors of
/// X X^T, loadings X^T F / T.
FactorFit pca_fit(const Eigen::Ref<const Matrix>& x, int r);
FactorFit pca_fit(const Panel& panel, int r);

/// Penalized PCA with the all-pairs squared fusion penalty. Scores come from
/// the leading eigenvectors of X D^{-1} X^T, assembled as a rescaled X X^T
/// plus a rank-one term in the row sums s = X 1; loadings are
/// D^{-1} X^T F / T.
FactorFit ppca_fit(const Eigen::Ref<const Matrix>& x, int r, double lambda);
FactorFit ppca_fit(const Panel& panel, int r, double lambda);

/// Same as ppca_fit but reusing a precomputed gram = X X^T and row sums
/// s = X 1 (both for exactly the rows of x). Used by cross-validation,
/// which refits the same training rows for every candidate lambda.
FactorFit ppca_fit_from_gram(const Eigen::Ref<const Matrix>& x,
                             const Eigen::Ref<const Matrix>& gram,
                             const Eigen::Ref<const Vector>& row_sums, int r, double lambda);

CommonComponents common_components(const FactorFit& fit);

/// Rate-optimal penalty N / (T * ||B*||_F^2) where B* is B with its
/// cross-sectional mean row removed. Returns kInfiniteLambda when the
/// loadings are all identical.
double oracle_lambda(const Eigen::Ref<const Matrix>& true_loadings, Index t);

/// Penalized least-squares objective
///   (1/(TN)) ||X - F B^T||_F^2 + (lambda/N) tr(B^T Pi_N B),
/// with Pi_N = I - 1 1^T / N.
double penalized_objective(const Eigen::Ref<const Matrix>& x,
                           const Eigen::Ref<const Matrix>& scores,
                           const Eigen::Ref<const Matrix>& loadings, double lambda);

}  // namespace factorgroup
