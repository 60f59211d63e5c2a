#include "factorgroup/tuning.hpp"

#include <algorithm>
#include <cmath>

#include "factorgroup/estimators.hpp"
#include "factorgroup/grouping.hpp"
#include "factorgroup/parallel.hpp"
#include "factorgroup/refit.hpp"
#include "symmetric_eigen.hpp"

namespace factorgroup {

std::vector<double> default_lambda_grid(Index n) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "lambda grid needs n >= 2");
  std::vector<double> grid;
  // 1/b for b = 0.05 j is exactly 20 / j
  for (int j = 20; j >= 1; --j) grid.push_back(20.0 / static_cast<double>(j));
  grid.push_back(static_cast<double>(n));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<double> library_lambda_grid(Index n) {
  auto grid = default_lambda_grid(n);
  grid.insert(grid.begin(), 0.0);
  return grid;
}

std::vector<std::pair<Index, Index>> fold_blocks(Index t, int folds) {
  if (folds < 2 || folds > t) {
    throw Error(ErrorCode::InvalidArgument,
                "folds=" + std::to_string(folds) + " outside [2, T=" + std::to_string(t) + "]");
  }
  std::vector<std::pair<Index, Index>> blocks;
  const Index base = t / folds;
  const Index extra = t % folds;
  Index begin = 0;
  for (int f = 0; f < folds; ++f) {
    const Index len = base + (f < extra ? 1 : 0);
    blocks.emplace_back(begin, begin + len);
    begin += len;
  }
  return blocks;
}

double heldout_loss(const Eigen::Ref<const Matrix>& x_val,
                    const Eigen::Ref<const Matrix>& loadings) {
  if (loadings.rows() != x_val.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "held-out rows and loadings disagree on N");
  }
  Eigen::JacobiSVD<Matrix> svd(loadings, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double tol = sv.size() > 0 ? sv(0) * static_cast<double>(loadings.rows()) *
                                         std::numeric_limits<double>::epsilon()
                                   : 0.0;
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > tol) ++rank;
  if (rank == 0) return x_val.squaredNorm();
  const auto basis = svd.matrixU().leftCols(rank);
  const Matrix coef = x_val * basis;
  return (x_val - coef * basis.transpose()).squaredNorm();
}

CvReport cv_select_lambda(const Eigen::Ref<const Matrix>& x, int r, std::vector<double> grid,
                          int folds, CvMode mode, const CvOptions& options) {
  const Index t = x.rows();
  const Index n = x.cols();
  if (grid.empty()) throw Error(ErrorCode::InvalidArgument, "lambda grid is empty");
  for (double lambda : grid) {
    if (!std::isfinite(lambda) || lambda < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "lambda grid entries must be finite and >= 0");
    }
  }
  const auto blocks = fold_blocks(t, folds);
  for (const auto& [begin, end] : blocks) {
    if (t - (end - begin) < r + 1) {
      throw Error(ErrorCode::InsufficientRows,
                  "training split has " + std::to_string(t - (end - begin)) +
                      " rows, need at least r + 1 = " + std::to_string(r + 1));
    }
  }
  const int k_bar = options.k_bar > 0 ? std::min<int>(options.k_bar, static_cast<int>(n))
                                      : default_k_bar(n);

  // Training grams are principal submatrices of the full gram.
  const Matrix full_gram = detail::gram(x);
  const Vector full_row_sums = x.rowwise().sum();

  CvReport report;
  report.mode = mode;
  report.folds = folds;
  report.cv_scores = Matrix::Zero(static_cast<Index>(grid.size()), folds);

  parallel_for(blocks.size(), options.threads, [&](std::size_t f) {
    const auto [begin, end] = blocks[f];
    std::vector<Index> train;
    train.reserve(static_cast<std::size_t>(t - (end - begin)));
    for (Index row = 0; row < t; ++row) {
      if (row < begin || row >= end) train.push_back(row);
    }
    const Matrix x_train = x(train, Eigen::all);
    const Matrix gram_train = full_gram(train, train);
    const Vector sums_train = full_row_sums(train);
    const auto x_val = x.middleRows(begin, end - begin);

    for (std::size_t g = 0; g < grid.size(); ++g) {
      const FactorFit fit = ppca_fit_from_gram(x_train, gram_train, sums_train, r, grid[g]);
      double loss;
      if (mode == CvMode::CV1) {
        loss = heldout_loss(x_val, fit.loadings);
      } else {
        const AhcPath path = ahc_complete_linkage(loading_distances(fit.loadings));
        const auto selection = select_group_count(x_train, fit.scores, path, k_bar);
        const Matrix grouped = postgroup_loadings(x_train, fit.scores, path.at(selection.k_hat));
        loss = heldout_loss(x_val, grouped);
      }
      report.cv_scores(static_cast<Index>(g), static_cast<Index>(f)) = loss;
    }
  });

  const Vector totals = report.cv_scores.rowwise().sum();
  const double best = totals.minCoeff();
  const double tie_tol = 1e-12 * x.squaredNorm();
  // smallest lambda among the (near-)minimizers
  std::size_t pick = 0;
  double pick_lambda = kInfiniteLambda;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (totals(static_cast<Index>(g)) <= best + tie_tol && grid[g] < pick_lambda) {
      pick = g;
      pick_lambda = grid[g];
    }
  }
  report.lambda_hat = grid[pick];
  report.grid = std::move(grid);
  return report;
}

CvReport cv_select_lambda(const Panel& panel, int r, std::vector<double> grid, int folds,
                          CvMode mode, const CvOptions& options) {
  return cv_select_lambda(panel.values(), r, std::move(grid), folds, mode, options);
}

}  // namespace factorgroup
