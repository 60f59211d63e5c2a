#pragma once

#include <optional>

#include "factorgroup/factor_count.hpp"
#include "factorgroup/grouping.hpp"
#include "factorgroup/tuning.hpp"

namespace factorgroup {

struct PipelineOptions {
  int r = 0;                      // 0: choose by IC2
  int r_max = 0;                  // 0: default_r_max
  std::optional<double> lambda;   // unset: cross-validate
  CvMode cv_mode = CvMode::CV2;
  int folds = 20;
  std::vector<double> grid;       // empty: library_lambda_grid, or default_lambda_grid with paper_grid
  bool paper_grid = false;
  int k_bar = 0;                  // 0: default_k_bar
  int threads = 1;
};

/// Output of the full estimate -> cluster -> refit chain.
struct GroupedModel {
  std::optional<FactorCountReport> factor_count;
  std::optional<CvReport> cv;
  FactorFit initial;  // PCA when lambda = 0, otherwise PPCA
  AhcPath path;
  GroupSelectionReport selection;
  Partition partition;
  FactorFit post;     // group-mean loadings, regression scores
};

/// AHC on l1 loading distances of `initial` -> IC(K) -> post-grouping refit.
/// The returned model has no factor_count / cv entries.
GroupedModel group_from_fit(const Eigen::Ref<const Matrix>& x, FactorFit initial, int k_bar);

/// factor count (IC2) -> lambda (CV) -> PPCA -> AHC on l1 loading distances
/// -> IC(K) -> post-grouping refit.
GroupedModel fit_grouped_model(const Eigen::Ref<const Matrix>& x, const PipelineOptions& options);

/// The lambda grid `options` resolves to for a panel of width n.
std::vector<double> resolve_grid(const PipelineOptions& options, Index n);

}  // namespace factorgroup
