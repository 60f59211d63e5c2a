#include "symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

namespace factorgroup::detail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// (T - shift I) y = b for symmetric tridiagonal T, Gaussian elimination with
// partial pivoting. Tiny pivots are replaced by `tiny`. b is overwritten.
void tridiagonal_solve(const Vector& diag, const Vector& off, double shift, double tiny, Vector& b) {
  const Index n = diag.size();
  Vector dd = diag.array() - shift;
  if (n == 1) {
    if (std::abs(dd(0)) < tiny) dd(0) = tiny;
    b(0) /= dd(0);
    return;
  }
  Vector dl = off, du = off, du2 = Vector::Zero(n);
  std::vector<char> swapped(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i + 1 < n; ++i) {
    if (std::abs(dd(i)) >= std::abs(dl(i))) {
      if (std::abs(dd(i)) < tiny) dd(i) = dd(i) < 0 ? -tiny : tiny;
      const double fact = dl(i) / dd(i);
      dl(i) = fact;
      dd(i + 1) -= fact * du(i);
    } else {
      swapped[static_cast<std::size_t>(i)] = 1;
      const double fact = dd(i) / dl(i);
      dd(i) = dl(i);
      dl(i) = fact;
      const double temp = du(i);
      du(i) = dd(i + 1);
      dd(i + 1) = temp - fact * dd(i + 1);
      if (i + 2 < n) {
        du2(i) = du(i + 1);
        du(i + 1) = -fact * du(i + 1);
      }
    }
  }
  if (std::abs(dd(n - 1)) < tiny) dd(n - 1) = dd(n - 1) < 0 ? -tiny : tiny;

  for (Index i = 0; i + 1 < n; ++i) {
    if (swapped[static_cast<std::size_t>(i)]) std::swap(b(i), b(i + 1));
    b(i + 1) -= dl(i) * b(i);
  }
  b(n - 1) /= dd(n - 1);
  b(n - 2) = (b(n - 2) - du(n - 2) * b(n - 1)) / dd(n - 2);
  for (Index i = n - 3; i >= 0; --i) {
    b(i) = (b(i) - du(i) * b(i + 1) - du2(i) * b(i + 2)) / dd(i);
  }
}

}  // namespace

TopEigenpairs top_eigenpairs(Matrix sym, int count) {
  const Index n = sym.rows();
  if (sym.cols() != n || count < 1 || count > n) {
    throw Error(ErrorCode::InvalidArgument, "top_eigenpairs: bad shape or count");
  }
  if (!sym.allFinite()) throw Error(ErrorCode::EigenFailure, "top_eigenpairs: non-finite input");

  if (n <= 2 * count + 8) {
    Eigen::SelfAdjointEigenSolver<Matrix> full(sym);
    if (full.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver did not converge");
    TopEigenpairs out{Vector(count), Matrix(n, count)};
    for (int j = 0; j < count; ++j) {
      out.values(j) = full.eigenvalues()(n - 1 - j);
      out.vectors.col(j) = full.eigenvectors().col(n - 1 - j);
    }
    return out;
  }

  Eigen::Tridiagonalization<Matrix> tri(sym);
  const Vector diag = tri.diagonal();
  const Vector off = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> values_only;
  values_only.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
  if (values_only.info() != Eigen::Success) {
    throw Error(ErrorCode::EigenFailure, "tridiagonal eigenvalue iteration did not converge");
  }
  const Vector& ascending = values_only.eigenvalues();

  double norm = 0.0;
  for (Index i = 0; i < n; ++i) {
    double row = std::abs(diag(i));
    if (i > 0) row += std::abs(off(i - 1));
    if (i + 1 < n) row += std::abs(off(i));
    norm = std::max(norm, row);
  }
  const double scale = norm > 0.0 ? norm : 1.0;
  const double tiny = kEps * scale;
  const double cluster_gap = 1e-3 * scale;

  Matrix y(n, count);
  double previous = 0.0;
  double shift = 0.0;
  for (int j = 0; j < count; ++j) {
    const double mu = ascending(n - 1 - j);
    const bool clustered = j > 0 && previous - mu <= cluster_gap;
    shift = clustered ? std::min(mu, shift - 10.0 * kEps * scale) : mu;
    // fixed, data-independent start
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(1.0 + 2.0 * static_cast<double>(i) + j);
    for (int iter = 0; iter < 4; ++iter) {
      v.normalize();
      tridiagonal_solve(diag, off, shift, tiny, v);
      for (int k = j - 1; k >= 0 && ascending(n - 1 - k) - mu <= cluster_gap; --k) {
        v -= y.col(k).dot(v) * y.col(k);
      }
    }
    const double len = v.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
      throw Error(ErrorCode::EigenFailure, "inverse iteration failed");
    }
    y.col(j) = v / len;
    previous = mu;
  }

  // back to the original basis, then Rayleigh-Ritz for an exactly orthonormal result
  Matrix basis = tri.matrixQ() * y;
  Eigen::HouseholderQR<Matrix> qr(basis);
  basis = qr.householderQ() * Matrix::Identity(n, count);
  const Matrix projected = basis.transpose() * sym.selfadjointView<Eigen::Lower>() * basis;
  Eigen::SelfAdjointEigenSolver<Matrix> small(projected);
  if (small.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "Rayleigh-Ritz step failed");

  TopEigenpairs out{Vector(count), Matrix(n, count)};
  for (int j = 0; j < count; ++j) {
    out.values(j) = small.eigenvalues()(count - 1 - j);
    out.vectors.col(j) = basis * small.eigenvectors().col(count - 1 - j);
  }
  return out;
}

void fix_column_signs(Matrix& vectors) {
  for (Index j = 0; j < vectors.cols(); ++j) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, j) < 0.0) vectors.col(j) *= -1.0;
  }
}

Matrix gram(const Eigen::Ref<const Matrix>& x) {
  Matrix g = Matrix::Zero(x.rows(), x.rows());
  g.selfadjointView<Eigen::Lower>().rankUpdate(x);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

}  // namespace factorgroup::detail
