#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup {

/// Scaled l1 distances between loading rows: d(i, j) = (1/r) sum_l |b_il - b_jl|.
DistanceMatrix loading_distances(const Eigen::Ref<const Matrix>& loadings);

struct MergeStep {
  int step = 0;  // 1-based; step s leaves N - s groups
  // Groups are identified by their smallest member (1-based series index).
  // group_a < group_b and the merged group keeps group_a's id.
  int group_a = 0;
  int group_b = 0;
  double distance = 0.0;
};

/// Full complete-linkage agglomeration from N singletons down to one group.
struct AhcPath {
  std::vector<Partition> partitions;  // partitions[K - 1] has exactly K groups
  std::vector<MergeStep> merge_log;   // N - 1 merges

  const Partition& at(int k) const;
  int n() const noexcept { return static_cast<int>(partitions.size()); }
};

/// Agglomerative clustering with complete linkage
///   D(A, B) = max_{i in A, j in B} d(i, j).
/// Each step merges the closest pair; equal distances go to the
/// lexicographically smallest (group_a, group_b) pair.
AhcPath ahc_complete_linkage(const DistanceMatrix& d);

/// S(K) = (NT)^{-1} ||X - F B~^T||_F^2 where B~ are the group-mean loadings
/// of `partition` given scores F.
double goodness_of_fit(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& scores,
                       const Partition& partition);
double goodness_of_fit(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                       const Partition& partition);

/// log(m) / m with m = min(min_group_size, T). Throws DegenerateGroup when m < 2.
double rho_default(int min_group_size, Index t);

struct GroupSelectionReport {
  int k_hat = 1;
  std::vector<double> ic_values;   // K = 1..k_bar
  std::vector<double> s_values;
  std::vector<double> rho_values;
};

/// min(15, N)
int default_k_bar(Index n);

/// K^ = argmin_{1 <= K <= k_bar} log S(K) + K rho(K), ties to the smaller K.
/// rho(K) uses the smallest group of the K-group partition; singleton groups
/// are charged the two-member rate, log(2)/2.
GroupSelectionReport select_group_count(const Eigen::Ref<const Matrix>& x,
                                        const Eigen::Ref<const Matrix>& scores,
                                        const AhcPath& path, int k_bar);
GroupSelectionReport select_group_count(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                                        const AhcPath& path, int k_bar);

}  // namespace factorgroup
