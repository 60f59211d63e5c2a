#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "factorgroup/errors.hpp"

namespace factorgroup {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// A T x N panel: rows are time points, columns are series.
///
/// Construction validates shape (T >= 2, N >= 2), label counts and
/// finiteness; a Panel is immutable afterwards.
class Panel {
 public:
  Panel(Matrix values, std::vector<std::string> time_labels,
        std::vector<std::string> series_names);

  /// Panel with generated labels "t1".."tT" and "s1".."sN".
  static Panel from_matrix(Matrix values);

  const Matrix& values() const noexcept { return values_; }
  const std::vector<std::string>& time_labels() const noexcept { return time_labels_; }
  const std::vector<std::string>& series_names() const noexcept { return series_names_; }
  Index t() const noexcept { return values_.rows(); }
  Index n() const noexcept { return values_.cols(); }

  /// Sub-panel on the given (sorted or unsorted) row indices.
  Panel rows(const std::vector<Index>& row_indices) const;

 private:
  Matrix values_;
  std::vector<std::string> time_labels_;
  std::vector<std::string> series_names_;
};

Panel make_panel(Matrix values, std::vector<std::string> time_labels,
                 std::vector<std::string> series_names);

enum class FitMethod { PCA, PPCA, POSTGROUP };

std::string to_string(FitMethod method);

inline constexpr double kInfiniteLambda = std::numeric_limits<double>::infinity();

struct FactorFit {
  Matrix scores;       // T x r
  Matrix loadings;     // N x r
  int r = 0;
  double lambda = 0.0;
  FitMethod method = FitMethod::PCA;
  // Leading eigenvalues (descending) of the decomposed T x T matrix; empty
  // for POSTGROUP fits.
  Vector eigenvalues;
};

/// Disjoint, exhaustive assignment of N series to groups 1..k.
///
/// Group ids are canonical: numbered by order of first appearance.
class Partition {
 public:
  const std::vector<int>& assignment() const noexcept { return assignment_; }
  int k() const noexcept { return k_; }
  const std::vector<int>& sizes() const noexcept { return sizes_; }
  std::size_t n() const noexcept { return assignment_.size(); }
  int min_group_size() const;

  /// Member indices (0-based) of each group, groups ordered by id.
  std::vector<std::vector<Index>> members() const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  friend Partition partition_from_assignment(const std::vector<int>& assignment);
  std::vector<int> assignment_;
  int k_ = 0;
  std::vector<int> sizes_;
};

Partition partition_from_assignment(const std::vector<int>& assignment);

/// Symmetric, zero-diagonal, nonnegative N x N matrix.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(Matrix d);

  const Matrix& values() const noexcept { return d_; }
  Index n() const noexcept { return d_.rows(); }
  double operator()(Index i, Index j) const { return d_(i, j); }

 private:
  Matrix d_;
};

struct CommonComponents {
  Matrix c;  // T x N
};

}  // namespace factorgroup
