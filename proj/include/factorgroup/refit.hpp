#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup {

/// Group-mean loadings given scores with F^T F / T = I_r: every member of
/// group k gets (T |G_k|)^{-1} F^T sum_{i in G_k} x_i.
Matrix postgroup_loadings(const Eigen::Ref<const Matrix>& x,
                          const Eigen::Ref<const Matrix>& scores, const Partition& partition);
Matrix postgroup_loadings(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                          const Partition& partition);

/// Cross-sectional least squares F = X B (B^T B)^{-1}.
/// Throws SingularLoadings when cond(B^T B) exceeds 1e12.
Matrix refit_factors(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& loadings);
Matrix refit_factors(const Panel& panel, const Eigen::Ref<const Matrix>& loadings);

/// postgroup_loadings followed by refit_factors. `lambda` is carried over
/// from the fit that produced the scores.
FactorFit postgroup_fit(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& scores,
                        const Partition& partition, double lambda = 0.0);
FactorFit postgroup_fit(const Panel& panel, const FactorFit& initial, const Partition& partition);

inline constexpr double kMaxLoadingCondition = 1e12;

}  // namespace factorgroup
