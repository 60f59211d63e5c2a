#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "factorgroup/pipeline.hpp"

namespace factorgroup {

enum class Scenario { S1, S2 };

std::string to_string(Scenario scenario);
Scenario parse_scenario(const std::string& text);

// Scenario 1: three equal groups with loadings (2,0), (0,2), (2.4,3.2).
// Scenario 2: four equal groups with loadings (2,0), (0,2), (1,3), (3,1).
struct ScenarioConfig {
  Scenario scenario = Scenario::S1;
  Index t = 100;
  Index n = 90;
  double kappa = 0.5;
  double ar_coeff = 0.2;
  double band_value = 0.02;
  std::uint64_t seed = 1;
};

int group_count(Scenario scenario);
/// K0 x 2 group loading table.
Matrix group_loadings(Scenario scenario);

struct SimDraw {
  Panel panel;
  Matrix true_scores;    // T x 2
  Matrix true_loadings;  // N x 2
  Partition truth;
  Vector theta;          // per-series noise scale
};

using Rng = std::mt19937_64;

/// AR(1) columns f_t = phi f_{t-1} + v_t, v_t ~ N(0, 1), started from the
/// stationary law N(0, 1 / (1 - phi^2)).
Matrix gen_ar1_factors(Index t, int r, double phi, Rng& rng);

/// Tridiagonal matrix with unit diagonal and `band_value` on the first off-diagonals.
Matrix gen_banded(Index n, double band_value);

/// One draw x_ti = b_i^T f_t + sqrt(theta_i) e_ti with E = P1 S P2,
/// S_ti ~ N(0, kappa). Series are ordered by group.
SimDraw simulate(const ScenarioConfig& config);

/// Seed used for replication `rep` of a run seeded with `seed`.
std::uint64_t replication_seed(std::uint64_t seed, int rep);

/// (NT)^{-1} ||C_est - C_true||_F^2
double mse_common(const CommonComponents& estimated, const Eigen::Ref<const Matrix>& truth);

/// sqrt(1 - tr(Qe Qe^T Q Q^T) / r) over the left singular bases of the two
/// loading matrices, clamped to [0, 1]. With unequal column counts r is the
/// larger one. Throws RankDeficient if either input lacks full column rank.
double subspace_distance(const Eigen::Ref<const Matrix>& b_est,
                         const Eigen::Ref<const Matrix>& b_true);

struct ClusteringIndexes {
  double rand = 0.0;
  double arand = 0.0;
  double jaccard = 0.0;
  double purity = 0.0;
};

struct PairCounts {
  std::int64_t both = 0;        // same group in both partitions
  std::int64_t est_only = 0;    // together in est, apart in truth
  std::int64_t truth_only = 0;  // together in truth, apart in est
  std::int64_t neither = 0;
};

PairCounts pair_counts(const Partition& est, const Partition& truth);
ClusteringIndexes indexes_from_pairs(const PairCounts& pairs);

/// Rand, Hubert-Arabie adjusted Rand, Jaccard and purity of `est` against `truth`.
ClusteringIndexes clustering_indexes(const Partition& est, const Partition& truth);

struct MethodSummary {
  double k_hat_mean = 0.0;
  int freq_under = 0;
  int freq_over = 0;
  double rand = 0.0;
  double arand = 0.0;
  double jaccard = 0.0;
  double purity = 0.0;
  double subspace_dist = 0.0;
  double mse_postgroup = 0.0;
};

/// Monte-Carlo means. Top-level clustering fields describe AHC on PPCA
/// loadings; `tw` repeats them with PCA loadings as the initial estimate.
struct RepSummary {
  ScenarioConfig config;
  int n_reps = 0;
  int n_failures = 0;
  std::vector<std::string> failures;  // "rep <i>: <message>"

  double mse_ppca = 0.0;
  double mse_pca = 0.0;
  double lambda_mean = 0.0;
  int r_hat_correct = 0;

  double k_hat_mean = 0.0;
  int freq_under = 0;
  int freq_over = 0;
  double rand = 0.0;
  double arand = 0.0;
  double jaccard = 0.0;
  double purity = 0.0;
  double subspace_dist = 0.0;
  double mse_postgroup = 0.0;

  MethodSummary tw;
};

/// Per-replication outcome; exposed for tests and custom aggregation.
struct RepOutcome {
  bool ok = false;
  std::string error;
  int r_hat = 0;
  double lambda = 0.0;
  double mse_ppca = 0.0;
  double mse_pca = 0.0;
  int k_hat = 0;
  ClusteringIndexes ppca_index;
  double ppca_subspace = 0.0;
  double ppca_mse_post = 0.0;
  int tw_k_hat = 0;
  ClusteringIndexes tw_index;
  double tw_subspace = 0.0;
  double tw_mse_post = 0.0;
};

/// simulate -> IC2 -> CV -> PPCA and PCA -> AHC + IC(K) -> refit -> metrics,
/// for one replication. `options.r` / `options.lambda` override the
/// data-driven choices when set.
RepOutcome run_replication(const ScenarioConfig& config, int rep, const PipelineOptions& options);

/// n_reps replications on `threads` workers. Each replication has its own
/// RNG stream and results are reduced in replication order, so the summary
/// does not depend on the thread count.
RepSummary run_replications(const ScenarioConfig& config, int n_reps,
                            const PipelineOptions& options, int threads = 1);

}  // namespace factorgroup
