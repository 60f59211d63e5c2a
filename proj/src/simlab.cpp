#include "factorgroup/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "factorgroup/estimators.hpp"
#include "factorgroup/parallel.hpp"
#include "factorgroup/refit.hpp"

namespace factorgroup {

std::string to_string(Scenario scenario) { return scenario == Scenario::S1 ? "s1" : "s2"; }

Scenario parse_scenario(const std::string& text) {
  if (text == "s1" || text == "S1" || text == "1") return Scenario::S1;
  if (text == "s2" || text == "S2" || text == "2") return Scenario::S2;
  throw Error(ErrorCode::InvalidArgument, "unknown scenario '" + text + "'");
}

int group_count(Scenario scenario) { return scenario == Scenario::S1 ? 3 : 4; }

Matrix group_loadings(Scenario scenario) {
  if (scenario == Scenario::S1) {
    Matrix b(3, 2);
    b << 2.0, 0.0,
         0.0, 2.0,
         2.4, 3.2;
    return b;
  }
  Matrix b(4, 2);
  b << 2.0, 0.0,
       0.0, 2.0,
       1.0, 3.0,
       3.0, 1.0;
  return b;
}

namespace {

// Per-group noise variances of each scenario.
Vector printed_theta(Scenario scenario) {
  Vector theta(group_count(scenario));
  if (scenario == Scenario::S1) {
    theta << 16.0 / 3.0, 16.0 / 3.0, 64.0 / 3.0;
  } else {
    theta << 4.0, 4.0, 10.0, 10.0;
  }
  return theta;
}

double theta_from_loading(Scenario scenario, const Eigen::RowVectorXd& b) {
  const double sq = b.squaredNorm();
  return scenario == Scenario::S1 ? 4.0 * sq / 3.0 : sq;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Matrix gen_ar1_factors(Index t, int r, double phi, Rng& rng) {
  if (!(std::abs(phi) < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "AR(1) coefficient must satisfy |phi| < 1");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double stationary_sd = std::sqrt(1.0 / (1.0 - phi * phi));
  Matrix f(t, r);
  for (int m = 0; m < r; ++m) {
    f(0, m) = stationary_sd * normal(rng);
    for (Index s = 1; s < t; ++s) f(s, m) = phi * f(s - 1, m) + normal(rng);
  }
  return f;
}

Matrix gen_banded(Index n, double band_value) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "banded matrix needs n >= 1");
  Matrix p = Matrix::Identity(n, n);
  for (Index i = 0; i + 1 < n; ++i) {
    p(i, i + 1) = band_value;
    p(i + 1, i) = band_value;
  }
  return p;
}

SimDraw simulate(const ScenarioConfig& config) {
  const int k0 = group_count(config.scenario);
  if (config.n < k0 || config.n % k0 != 0) {
    throw Error(ErrorCode::IndivisibleGroups, "N=" + std::to_string(config.n) +
                                                  " is not a positive multiple of " +
                                                  std::to_string(k0) + " groups");
  }
  if (!(config.kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be > 0");
  if (config.t < 2) throw Error(ErrorCode::InvalidArgument, "T must be >= 2");

  const Index n = config.n;
  const Index t = config.t;
  const Index group_size = n / k0;
  const Matrix table = group_loadings(config.scenario);
  const Vector expected_theta = printed_theta(config.scenario);

  std::vector<int> labels(static_cast<std::size_t>(n));
  Matrix loadings(n, 2);
  Vector theta(n);
  for (Index i = 0; i < n; ++i) {
    const Index g = i / group_size;
    labels[static_cast<std::size_t>(i)] = static_cast<int>(g) + 1;
    loadings.row(i) = table.row(g);
    theta(i) = theta_from_loading(config.scenario, table.row(g));
    if (std::abs(theta(i) - expected_theta(g)) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "noise scale disagrees with the scenario table");
    }
  }

  std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                    static_cast<std::uint32_t>(config.seed >> 32)};
  Rng rng(seq);
  Matrix factors = gen_ar1_factors(t, 2, config.ar_coeff, rng);

  std::normal_distribution<double> noise(0.0, std::sqrt(config.kappa));
  Matrix s(t, n);
  for (Index row = 0; row < t; ++row) {
    for (Index col = 0; col < n; ++col) s(row, col) = noise(rng);
  }
  const Matrix e = gen_banded(t, config.band_value) * s * gen_banded(n, config.band_value);

  Matrix x = factors * loadings.transpose();
  x += e * theta.cwiseSqrt().asDiagonal();

  return SimDraw{Panel::from_matrix(std::move(x)), std::move(factors), std::move(loadings),
                 partition_from_assignment(labels), std::move(theta)};
}

std::uint64_t replication_seed(std::uint64_t seed, int rep) {
  return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(rep)));
}

double mse_common(const CommonComponents& estimated, const Eigen::Ref<const Matrix>& truth) {
  if (estimated.c.rows() != truth.rows() || estimated.c.cols() != truth.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "common components and truth differ in shape");
  }
  return (estimated.c - truth).squaredNorm() /
         (static_cast<double>(truth.rows()) * static_cast<double>(truth.cols()));
}

namespace {

Matrix left_basis(const Eigen::Ref<const Matrix>& b) {
  Eigen::JacobiSVD<Matrix> svd(b, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double tol = sv(0) * static_cast<double>(std::max(b.rows(), b.cols())) *
                     std::numeric_limits<double>::epsilon();
  if (!(sv(sv.size() - 1) > tol)) {
    throw Error(ErrorCode::RankDeficient, "loading matrix lacks full column rank");
  }
  return svd.matrixU();
}

}  // namespace

double subspace_distance(const Eigen::Ref<const Matrix>& b_est,
                         const Eigen::Ref<const Matrix>& b_true) {
  if (b_est.rows() != b_true.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "loading matrices differ in N");
  }
  if (b_est.cols() < 1 || b_true.cols() < 1 || b_est.cols() > b_est.rows() ||
      b_true.cols() > b_true.rows()) {
    throw Error(ErrorCode::RankDeficient, "loading matrices need 1 <= r <= N");
  }
  const Matrix q_est = left_basis(b_est);
  const Matrix q_true = left_basis(b_true);
  const double r = static_cast<double>(std::max(b_est.cols(), b_true.cols()));
  // tr(Qe Qe^T Q Q^T) = ||Qe^T Q||_F^2
  const double overlap = (q_est.transpose() * q_true).squaredNorm();
  const double value = 1.0 - overlap / r;
  return std::sqrt(std::clamp(value, 0.0, 1.0));
}

PairCounts pair_counts(const Partition& est, const Partition& truth) {
  if (est.n() != truth.n()) {
    throw Error(ErrorCode::LengthMismatch, "partitions cover " + std::to_string(est.n()) +
                                               " and " + std::to_string(truth.n()) + " series");
  }
  auto choose2 = [](std::int64_t m) { return m * (m - 1) / 2; };
  std::map<std::pair<int, int>, std::int64_t> table;
  for (std::size_t i = 0; i < est.n(); ++i) {
    ++table[{est.assignment()[i], truth.assignment()[i]}];
  }
  std::int64_t both = 0;
  for (const auto& [key, count] : table) both += choose2(count);
  std::int64_t est_pairs = 0;
  for (int s : est.sizes()) est_pairs += choose2(s);
  std::int64_t truth_pairs = 0;
  for (int s : truth.sizes()) truth_pairs += choose2(s);
  const std::int64_t total = choose2(static_cast<std::int64_t>(est.n()));

  PairCounts pairs;
  pairs.both = both;
  pairs.est_only = est_pairs - both;
  pairs.truth_only = truth_pairs - both;
  pairs.neither = total - both - pairs.est_only - pairs.truth_only;
  return pairs;
}

ClusteringIndexes indexes_from_pairs(const PairCounts& p) {
  const double a = static_cast<double>(p.both);
  const double b = static_cast<double>(p.est_only);
  const double c = static_cast<double>(p.truth_only);
  const double d = static_cast<double>(p.neither);
  ClusteringIndexes out;
  const double total = a + b + c + d;
  out.rand = total > 0.0 ? (a + d) / total : 1.0;
  out.jaccard = (a + b + c) > 0.0 ? a / (a + b + c) : 1.0;
  // Hubert-Arabie adjusted Rand in pair-count form. The denominator vanishes
  // only when both partitions are all-singletons or both are one group.
  const double denom = (a + b) * (b + d) + (a + c) * (c + d);
  out.arand = denom != 0.0 ? 2.0 * (a * d - b * c) / denom : 1.0;
  return out;
}

ClusteringIndexes clustering_indexes(const Partition& est, const Partition& truth) {
  ClusteringIndexes out = indexes_from_pairs(pair_counts(est, truth));
  std::vector<std::map<int, int>> overlap(static_cast<std::size_t>(est.k()));
  for (std::size_t i = 0; i < est.n(); ++i) {
    ++overlap[static_cast<std::size_t>(est.assignment()[i] - 1)][truth.assignment()[i]];
  }
  std::int64_t matched = 0;
  for (const auto& row : overlap) {
    int best = 0;
    for (const auto& [label, count] : row) best = std::max(best, count);
    matched += best;
  }
  out.purity = static_cast<double>(matched) / static_cast<double>(est.n());
  return out;
}

RepOutcome run_replication(const ScenarioConfig& config, int rep, const PipelineOptions& options) {
  RepOutcome out;
  try {
    ScenarioConfig rep_config = config;
    rep_config.seed = replication_seed(config.seed, rep);
    const SimDraw draw = simulate(rep_config);
    const Matrix& x = draw.panel.values();
    const Matrix truth = draw.true_scores * draw.true_loadings.transpose();

    int r = options.r;
    if (r <= 0) {
      const int r_max = options.r_max > 0 ? options.r_max : default_r_max(x.rows(), x.cols());
      r = ic2_select(x, r_max).r_hat;
    }
    out.r_hat = r;

    double lambda = 0.0;
    if (options.lambda) {
      lambda = *options.lambda;
    } else {
      CvOptions cv_options;
      cv_options.k_bar = options.k_bar;
      lambda = cv_select_lambda(x, r, resolve_grid(options, x.cols()), options.folds,
                                options.cv_mode, cv_options)
                   .lambda_hat;
    }
    out.lambda = lambda;

    FactorFit pca = pca_fit(x, r);
    FactorFit ppca = ppca_fit(x, r, lambda);
    out.mse_ppca = mse_common(common_components(ppca), truth);
    out.mse_pca = mse_common(common_components(pca), truth);

    const int k_bar = options.k_bar > 0 ? std::min<int>(options.k_bar, static_cast<int>(x.cols()))
                                        : default_k_bar(x.cols());
    const GroupedModel grouped = group_from_fit(x, std::move(ppca), k_bar);
    out.k_hat = grouped.selection.k_hat;
    out.ppca_index = clustering_indexes(grouped.partition, draw.truth);
    out.ppca_subspace = subspace_distance(grouped.post.loadings, draw.true_loadings);
    out.ppca_mse_post = mse_common(common_components(grouped.post), truth);

    const GroupedModel tw = group_from_fit(x, std::move(pca), k_bar);
    out.tw_k_hat = tw.selection.k_hat;
    out.tw_index = clustering_indexes(tw.partition, draw.truth);
    out.tw_subspace = subspace_distance(tw.post.loadings, draw.true_loadings);
    out.tw_mse_post = mse_common(common_components(tw.post), truth);
    out.ok = true;
  } catch (const std::exception& e) {
    out.ok = false;
    out.error = e.what();
  }
  return out;
}

RepSummary run_replications(const ScenarioConfig& config, int n_reps,
                            const PipelineOptions& options, int threads) {
  if (n_reps < 1) throw Error(ErrorCode::InvalidArgument, "n_reps must be >= 1");
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(n_reps));
  parallel_for(outcomes.size(), threads, [&](std::size_t i) {
    outcomes[i] = run_replication(config, static_cast<int>(i), options);
  });

  RepSummary summary;
  summary.config = config;
  summary.n_reps = n_reps;
  const int k0 = group_count(config.scenario);
  int ok = 0;
  auto tally = [k0](int k_hat, int& under, int& over) {
    if (k_hat < k0) ++under;
    if (k_hat > k0) ++over;
  };
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const RepOutcome& o = outcomes[i];
    if (!o.ok) {
      ++summary.n_failures;
      summary.failures.push_back("rep " + std::to_string(i) + ": " + o.error);
      continue;
    }
    ++ok;
    summary.mse_ppca += o.mse_ppca;
    summary.mse_pca += o.mse_pca;
    summary.lambda_mean += o.lambda;
    if (o.r_hat == 2) ++summary.r_hat_correct;

    summary.k_hat_mean += o.k_hat;
    tally(o.k_hat, summary.freq_under, summary.freq_over);
    summary.rand += o.ppca_index.rand;
    summary.arand += o.ppca_index.arand;
    summary.jaccard += o.ppca_index.jaccard;
    summary.purity += o.ppca_index.purity;
    summary.subspace_dist += o.ppca_subspace;
    summary.mse_postgroup += o.ppca_mse_post;

    MethodSummary& tw = summary.tw;
    tw.k_hat_mean += o.tw_k_hat;
    tally(o.tw_k_hat, tw.freq_under, tw.freq_over);
    tw.rand += o.tw_index.rand;
    tw.arand += o.tw_index.arand;
    tw.jaccard += o.tw_index.jaccard;
    tw.purity += o.tw_index.purity;
    tw.subspace_dist += o.tw_subspace;
    tw.mse_postgroup += o.tw_mse_post;
  }
  if (ok > 0) {
    const double inv = 1.0 / static_cast<double>(ok);
    for (double* v : {&summary.mse_ppca, &summary.mse_pca, &summary.lambda_mean,
                      &summary.k_hat_mean, &summary.rand, &summary.arand, &summary.jaccard,
                      &summary.purity, &summary.subspace_dist, &summary.mse_postgroup,
                      &summary.tw.k_hat_mean, &summary.tw.rand, &summary.tw.arand,
                      &summary.tw.jaccard, &summary.tw.purity, &summary.tw.subspace_dist,
                      &summary.tw.mse_postgroup}) {
      *v *= inv;
    }
  }
  return summary;
}

}  // namespace factorgroup
