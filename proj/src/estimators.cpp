#include "factorgroup/estimators.hpp"

#include <cmath>
#include <sstream>

#include "symmetric_eigen.hpp"

namespace factorgroup {
namespace {

void check_rank_request(Index t, Index n, int r) {
  if (r < 1 || r > std::min(t, n)) {
    throw Error(ErrorCode::InvalidArgument, "factor count r=" + std::to_string(r) +
                                                " outside [1, min(T, N)]");
  }
}

// Scores and eigenvalues from the leading eigenpairs of a T x T symmetric
// matrix. Eigenvalues at or below roundoff level of the largest one count as
// zero.
void scores_from_matrix(Matrix sym, int r, FactorFit& fit) {
  const Index t = sym.rows();
  const double scale = sym.diagonal().cwiseAbs().maxCoeff();
  auto eig = detail::top_eigenpairs(std::move(sym), r);
  const double tol = static_cast<double>(t) * std::numeric_limits<double>::epsilon() *
                     std::max(scale, std::abs(eig.values(0)));
  if (!(eig.values(r - 1) > tol)) {
    std::ostringstream msg;
    msg << "fewer than " << r << " strictly positive eigenvalues; leading eigenvalues:";
    for (Index j = 0; j < eig.values.size(); ++j) msg << ' ' << eig.values(j);
    throw Error(ErrorCode::RankDeficient, msg.str());
  }
  detail::fix_column_signs(eig.vectors);
  fit.scores = std::sqrt(static_cast<double>(t)) * eig.vectors;
  fit.eigenvalues = std::move(eig.values);
  fit.r = r;
}

}  // namespace

ShrinkOperator::ShrinkOperator(double lambda, Index n) : lambda_(lambda), n_(n) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "shrink operator needs finite lambda >= 0");
  }
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "shrink operator needs n >= 1");
}

Matrix ShrinkOperator::apply(const Eigen::Ref<const Matrix>& m) const {
  if (m.rows() != n_) {
    throw Error(ErrorCode::DimensionMismatch, "shrink operator of size " + std::to_string(n_) +
                                                  " applied to " + std::to_string(m.rows()) +
                                                  " rows");
  }
  const double diag = 1.0 / (1.0 + lambda_);
  const double rank_one = lambda_ / ((1.0 + lambda_) * static_cast<double>(n_));
  Matrix out = diag * m;
  out.rowwise() += rank_one * m.colwise().sum();
  return out;
}

Matrix shrink_apply(const ShrinkOperator& op, const Eigen::Ref<const Matrix>& m) {
  return op.apply(m);
}

FactorFit pca_fit(const Eigen::Ref<const Matrix>& x, int r) {
  check_rank_request(x.rows(), x.cols(), r);
  FactorFit fit;
  scores_from_matrix(detail::gram(x), r, fit);
  fit.loadings = x.transpose() * fit.scores / static_cast<double>(x.rows());
  fit.lambda = 0.0;
  fit.method = FitMethod::PCA;
  return fit;
}

FactorFit pca_fit(const Panel& panel, int r) { return pca_fit(panel.values(), r); }

FactorFit ppca_fit_from_gram(const Eigen::Ref<const Matrix>& x,
                             const Eigen::Ref<const Matrix>& gram,
                             const Eigen::Ref<const Vector>& row_sums, int r, double lambda) {
  check_rank_request(x.rows(), x.cols(), r);
  const ShrinkOperator shrink(lambda, x.cols());
  if (gram.rows() != x.rows() || gram.cols() != x.rows() || row_sums.size() != x.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "gram/row sums do not match the panel rows");
  }
  // X D^{-1} X^T = X X^T / (1 + lambda) + lambda / ((1 + lambda) N) * s s^T
  const double rank_one = lambda / ((1.0 + lambda) * static_cast<double>(x.cols()));
  Matrix m = gram / (1.0 + lambda);
  m.noalias() += rank_one * row_sums * row_sums.transpose();

  FactorFit fit;
  scores_from_matrix(std::move(m), r, fit);
  fit.loadings = shrink.apply(x.transpose() * fit.scores) / static_cast<double>(x.rows());
  fit.lambda = lambda;
  fit.method = FitMethod::PPCA;
  return fit;
}

FactorFit ppca_fit(const Eigen::Ref<const Matrix>& x, int r, double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "ppca_fit needs finite lambda >= 0");
  }
  const Vector row_sums = x.rowwise().sum();
  return ppca_fit_from_gram(x, detail::gram(x), row_sums, r, lambda);
}

FactorFit ppca_fit(const Panel& panel, int r, double lambda) {
  return ppca_fit(panel.values(), r, lambda);
}

CommonComponents common_components(const FactorFit& fit) {
  return CommonComponents{fit.scores * fit.loadings.transpose()};
}

double oracle_lambda(const Eigen::Ref<const Matrix>& true_loadings, Index t) {
  if (t < 1) throw Error(ErrorCode::InvalidArgument, "oracle_lambda needs T >= 1");
  const Eigen::RowVectorXd mean = true_loadings.colwise().mean();
  const double centered = (true_loadings.rowwise() - mean).squaredNorm();
  if (centered == 0.0) return kInfiniteLambda;
  return static_cast<double>(true_loadings.rows()) / (static_cast<double>(t) * centered);
}

double penalized_objective(const Eigen::Ref<const Matrix>& x,
                           const Eigen::Ref<const Matrix>& scores,
                           const Eigen::Ref<const Matrix>& loadings, double lambda) {
  const double t = static_cast<double>(x.rows());
  const double n = static_cast<double>(x.cols());
  const double fit = (x - scores * loadings.transpose()).squaredNorm() / (t * n);
  // tr(B^T Pi_N B) = ||B - 1 mean(B)||_F^2
  const Eigen::RowVectorXd mean = loadings.colwise().mean();
  const double spread = (loadings.rowwise() - mean).squaredNorm();
  return fit + lambda / n * spread;
}

}  // namespace factorgroup
