#include "factorgroup/factor_count.hpp"

#include <cmath>
#include <limits>

#include "symmetric_eigen.hpp"

namespace factorgroup {

int default_r_max(Index t, Index n) {
  return static_cast<int>(std::min<Index>(8, std::min(t, n) - 1));
}

FactorCountReport ic2_select(const Eigen::Ref<const Matrix>& x, int r_max) {
  const Index t = x.rows();
  const Index n = x.cols();
  if (r_max < 1 || r_max > std::min(t, n) - 1) {
    throw Error(ErrorCode::InvalidArgument,
                "r_max=" + std::to_string(r_max) + " outside [1, min(T, N) - 1]");
  }
  // The k-factor PCA fits are nested: the fitted common component for k
  // factors is the projection of X onto the leading k eigenvectors of X X^T,
  // so one decomposition serves every k. Its sign convention is irrelevant
  // to the residual.
  auto eig = detail::top_eigenpairs(detail::gram(x), r_max);

  const double nt = static_cast<double>(n) * static_cast<double>(t);
  const double total = x.squaredNorm() / nt;
  // residual variance left by rounding after projecting out an exact factor
  const double rounding = 16.0 * static_cast<double>(std::max(n, t)) * std::numeric_limits<double>::epsilon();
  const double zero_tol = rounding * rounding * total;
  const double penalty_rate =
      static_cast<double>(n + t) / nt * std::log(static_cast<double>(std::min(n, t)));

  FactorCountReport report;
  Matrix residual = x;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= r_max; ++k) {
    const auto u = eig.vectors.col(k - 1);
    const Eigen::RowVectorXd coef = u.transpose() * residual;
    residual.noalias() -= u * coef;
    double v = residual.squaredNorm() / nt;
    double ic;
    if (v <= zero_tol) {
      v = 0.0;
      ic = -std::numeric_limits<double>::infinity();
    } else {
      ic = std::log(v) + static_cast<double>(k) * penalty_rate;
    }
    report.residual_variances.push_back(v);
    report.criterion_values.push_back(ic);
    if (ic < best) {
      best = ic;
      report.r_hat = k;
    }
  }
  return report;
}

FactorCountReport ic2_select(const Panel& panel, int r_max) {
  return ic2_select(panel.values(), r_max);
}

}  // namespace factorgroup
