#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup {

struct FactorCountReport {
  int r_hat = 1;
  // IC2(k) for k = 1..r_max; -infinity where the k-factor residual vanishes.
  std::vector<double> criterion_values;
  // V(k) = ||X - F_k B_k^T||_F^2 / (NT) for k = 1..r_max.
  std::vector<double> residual_variances;
};

/// min(8, min(T, N) - 1)
int default_r_max(Index t, Index n);

/// Bai-Ng IC2 selection of the factor count:
///   IC2(k) = log V(k) + k (N + T) / (N T) log(min(N, T)),  k = 1..r_max,
/// with ties resolved towards the smaller k.
FactorCountReport ic2_select(const Eigen::Ref<const Matrix>& x, int r_max);
FactorCountReport ic2_select(const Panel& panel, int r_max);

}  // namespace factorgroup
