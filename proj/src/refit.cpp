#include "factorgroup/refit.hpp"

#include <cmath>
#include <sstream>

namespace factorgroup {

Matrix postgroup_loadings(const Eigen::Ref<const Matrix>& x,
                          const Eigen::Ref<const Matrix>& scores, const Partition& partition) {
  const Index t = x.rows();
  const Index n = x.cols();
  if (scores.rows() != t) {
    throw Error(ErrorCode::DimensionMismatch, "scores have " + std::to_string(scores.rows()) +
                                                  " rows, panel has " + std::to_string(t));
  }
  if (static_cast<Index>(partition.n()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "partition covers " +
                                                  std::to_string(partition.n()) +
                                                  " series, panel has " + std::to_string(n));
  }
  const Matrix identity_gap =
      scores.transpose() * scores / static_cast<double>(t) -
      Matrix::Identity(scores.cols(), scores.cols());
  if (identity_gap.cwiseAbs().maxCoeff() > 1e-6) {
    throw Error(ErrorCode::InvalidArgument, "group-mean loadings need scores with F^T F / T = I");
  }
  const int k = partition.k();
  const auto& assignment = partition.assignment();
  Matrix group_sums = Matrix::Zero(t, k);
  for (Index i = 0; i < n; ++i) {
    group_sums.col(assignment[static_cast<std::size_t>(i)] - 1) += x.col(i);
  }
  // K x r group loadings
  Matrix group_loadings = group_sums.transpose() * scores / static_cast<double>(t);
  for (int g = 0; g < k; ++g) {
    group_loadings.row(g) /= static_cast<double>(partition.sizes()[static_cast<std::size_t>(g)]);
  }
  Matrix loadings(n, scores.cols());
  for (Index i = 0; i < n; ++i) {
    loadings.row(i) = group_loadings.row(assignment[static_cast<std::size_t>(i)] - 1);
  }
  return loadings;
}

Matrix postgroup_loadings(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                          const Partition& partition) {
  return postgroup_loadings(panel.values(), scores, partition);
}

Matrix refit_factors(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& loadings) {
  if (loadings.rows() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "loadings have " + std::to_string(loadings.rows()) +
                                                  " rows, panel has " +
                                                  std::to_string(x.cols()) + " series");
  }
  const Matrix btb = loadings.transpose() * loadings;
  Eigen::SelfAdjointEigenSolver<Matrix> spectrum(btb, Eigen::EigenvaluesOnly);
  const double lo = spectrum.eigenvalues().minCoeff();
  const double hi = spectrum.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > kMaxLoadingCondition) {
    std::ostringstream msg;
    msg << "B^T B condition number " << (lo > 0.0 ? hi / lo : INFINITY) << " exceeds "
        << kMaxLoadingCondition;
    throw Error(ErrorCode::SingularLoadings, msg.str());
  }
  // F^T = (B^T B)^{-1} B^T X^T
  const Matrix rhs = loadings.transpose() * x.transpose();
  return btb.llt().solve(rhs).transpose();
}

Matrix refit_factors(const Panel& panel, const Eigen::Ref<const Matrix>& loadings) {
  return refit_factors(panel.values(), loadings);
}

FactorFit postgroup_fit(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& scores,
                        const Partition& partition, double lambda) {
  FactorFit fit;
  fit.loadings = postgroup_loadings(x, scores, partition);
  fit.scores = refit_factors(x, fit.loadings);
  fit.r = static_cast<int>(scores.cols());
  fit.lambda = lambda;
  fit.method = FitMethod::POSTGROUP;
  return fit;
}

FactorFit postgroup_fit(const Panel& panel, const FactorFit& initial, const Partition& partition) {
  return postgroup_fit(panel.values(), initial.scores, partition, initial.lambda);
}

}  // namespace factorgroup
