#include "factorgroup/pipeline.hpp"

#include "factorgroup/estimators.hpp"
#include "factorgroup/refit.hpp"

namespace factorgroup {

std::vector<double> resolve_grid(const PipelineOptions& options, Index n) {
  if (!options.grid.empty()) return options.grid;
  return options.paper_grid ? default_lambda_grid(n) : library_lambda_grid(n);
}

GroupedModel group_from_fit(const Eigen::Ref<const Matrix>& x, FactorFit initial, int k_bar) {
  GroupedModel model;
  model.initial = std::move(initial);
  model.path = ahc_complete_linkage(loading_distances(model.initial.loadings));
  model.selection = select_group_count(x, model.initial.scores, model.path, k_bar);
  model.partition = model.path.at(model.selection.k_hat);
  model.post = postgroup_fit(x, model.initial.scores, model.partition, model.initial.lambda);
  return model;
}

GroupedModel fit_grouped_model(const Eigen::Ref<const Matrix>& x, const PipelineOptions& options) {
  std::optional<FactorCountReport> factor_count;
  std::optional<CvReport> cv;
  int r = options.r;
  if (r <= 0) {
    const int r_max = options.r_max > 0 ? options.r_max : default_r_max(x.rows(), x.cols());
    factor_count = ic2_select(x, r_max);
    r = factor_count->r_hat;
  }

  double lambda = 0.0;
  if (options.lambda) {
    lambda = *options.lambda;
  } else {
    CvOptions cv_options;
    cv_options.k_bar = options.k_bar;
    cv_options.threads = options.threads;
    cv = cv_select_lambda(x, r, resolve_grid(options, x.cols()), options.folds, options.cv_mode,
                          cv_options);
    lambda = cv->lambda_hat;
  }

  const int k_bar = options.k_bar > 0 ? std::min<int>(options.k_bar, static_cast<int>(x.cols()))
                                      : default_k_bar(x.cols());
  GroupedModel model =
      group_from_fit(x, lambda == 0.0 ? pca_fit(x, r) : ppca_fit(x, r, lambda), k_bar);
  model.factor_count = std::move(factor_count);
  model.cv = std::move(cv);
  return model;
}

}  // namespace factorgroup
