#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup {

enum class CvMode { CV1, CV2 };

/// {1/b : b = 0.05, 0.10, ..., 1.00} united with {n}, ascending, deduplicated.
std::vector<double> default_lambda_grid(Index n);

/// default_lambda_grid(n) with lambda = 0 prepended, so plain PCA is always
/// among the candidates.
std::vector<double> library_lambda_grid(Index n);

struct CvOptions {
  int k_bar = 0;    // 0: default_k_bar(N); CV2 only
  int threads = 1;  // folds are processed in parallel
};

struct CvReport {
  double lambda_hat = 0.0;
  std::vector<double> grid;
  Matrix cv_scores;  // grid.size() x folds, squared held-out reconstruction error
  CvMode mode = CvMode::CV2;
  int folds = 0;
};

/// Blocked K-fold cross-validation of the penalty.
///
/// Rows are cut into `folds` contiguous blocks. For each candidate lambda and
/// each block the model is trained on the remaining rows: CV1 keeps the PPCA
/// loadings, CV2 runs PPCA -> AHC -> IC(K) -> group-mean loadings. Held-out
/// rows are projected on the trained loadings by cross-sectional least
/// squares and the squared residual is the fold loss. lambda_hat minimizes the
/// fold sum; losses within 1e-12 ||X||_F^2 of the minimum count as ties and
/// resolve to the smallest lambda.
CvReport cv_select_lambda(const Eigen::Ref<const Matrix>& x, int r, std::vector<double> grid,
                          int folds, CvMode mode, const CvOptions& options = {});
CvReport cv_select_lambda(const Panel& panel, int r, std::vector<double> grid, int folds,
                          CvMode mode, const CvOptions& options = {});

/// Contiguous fold blocks: the first T mod folds blocks get one extra row.
/// Returns [begin, end) row ranges.
std::vector<std::pair<Index, Index>> fold_blocks(Index t, int folds);

/// ||X_val - X_val P_B||_F^2 with P_B the orthogonal projector on span(B),
/// i.e. the residual of regressing each held-out row on the loadings.
double heldout_loss(const Eigen::Ref<const Matrix>& x_val, const Eigen::Ref<const Matrix>& loadings);

}  // namespace factorgroup
