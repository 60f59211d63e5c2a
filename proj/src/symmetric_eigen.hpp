#pragma once

#include "factorgroup/core_types.hpp"

namespace factorgroup::detail {

struct TopEigenpairs {
  Vector values;   // descending
  Matrix vectors;  // n x count, column j pairs with values(j)
};

// Leading `count` eigenpairs of a symmetric matrix. Only the lower triangle
// of `sym` is read. Householder tridiagonalization, all eigenvalues of the
// tridiagonal form, inverse iteration for the leading vectors, then a
// Rayleigh-Ritz pass on the original matrix.
TopEigenpairs top_eigenpairs(Matrix sym, int count);

// Flip each column so its largest-magnitude entry is positive (first index
// wins among equal magnitudes).
void fix_column_signs(Matrix& vectors);

// Full X * X^T.
Matrix gram(const Eigen::Ref<const Matrix>& x);

}  // namespace factorgroup::detail
