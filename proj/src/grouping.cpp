#include "factorgroup/grouping.hpp"

#include <cmath>
#include <limits>

#include "factorgroup/refit.hpp"

namespace factorgroup {

DistanceMatrix loading_distances(const Eigen::Ref<const Matrix>& loadings) {
  const Index n = loadings.rows();
  const double r = static_cast<double>(loadings.cols());
  if (n < 2 || loadings.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "loading_distances needs N >= 2 and r >= 1");
  }
  Matrix d = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      const double v = (loadings.row(i) - loadings.row(j)).cwiseAbs().sum() / r;
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(d));
}

const Partition& AhcPath::at(int k) const {
  if (k < 1 || k > n()) {
    throw Error(ErrorCode::InvalidArgument,
                "no " + std::to_string(k) + "-group partition on a path over " +
                    std::to_string(n()) + " series");
  }
  return partitions[static_cast<std::size_t>(k - 1)];
}

AhcPath ahc_complete_linkage(const DistanceMatrix& d) {
  const Index n = d.n();
  Matrix link = d.values();
  std::vector<char> active(static_cast<std::size_t>(n), 1);
  std::vector<int> owner(static_cast<std::size_t>(n));
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    owner[static_cast<std::size_t>(i)] = static_cast<int>(i);
    members[static_cast<std::size_t>(i)] = {i};
  }

  // Cached nearest partner with a larger id for every active group.
  std::vector<Index> nearest(static_cast<std::size_t>(n), -1);
  std::vector<double> nearest_dist(static_cast<std::size_t>(n),
                                   std::numeric_limits<double>::infinity());
  auto refresh = [&](Index a) {
    Index best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index c = a + 1; c < n; ++c) {
      if (active[static_cast<std::size_t>(c)] && link(a, c) < best_d) {
        best_d = link(a, c);
        best = c;
      }
    }
    nearest[static_cast<std::size_t>(a)] = best;
    nearest_dist[static_cast<std::size_t>(a)] = best_d;
  };
  for (Index a = 0; a < n; ++a) refresh(a);

  AhcPath path;
  std::vector<Partition> descending;  // N, N-1, ..., 1 groups
  descending.reserve(static_cast<std::size_t>(n));
  descending.push_back(partition_from_assignment(owner));

  for (int step = 1; step < n; ++step) {
    Index a = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (active[static_cast<std::size_t>(i)] && nearest[static_cast<std::size_t>(i)] >= 0 &&
          (a < 0 || nearest_dist[static_cast<std::size_t>(i)] < best_d)) {
        a = i;
        best_d = nearest_dist[static_cast<std::size_t>(i)];
      }
    }
    const Index b = nearest[static_cast<std::size_t>(a)];
    path.merge_log.push_back(
        MergeStep{step, static_cast<int>(a) + 1, static_cast<int>(b) + 1, best_d});

    active[static_cast<std::size_t>(b)] = 0;
    for (Index c = 0; c < n; ++c) {
      if (active[static_cast<std::size_t>(c)] && c != a) {
        const double merged = std::max(link(a, c), link(b, c));
        link(a, c) = merged;
        link(c, a) = merged;
      }
    }
    auto& into = members[static_cast<std::size_t>(a)];
    for (Index m : members[static_cast<std::size_t>(b)]) {
      owner[static_cast<std::size_t>(m)] = static_cast<int>(a);
      into.push_back(m);
    }
    members[static_cast<std::size_t>(b)].clear();

    // Linkages only grow under complete linkage, so only rows that pointed at
    // a or b (and row a itself) can have a stale nearest partner.
    for (Index c = 0; c < n; ++c) {
      if (!active[static_cast<std::size_t>(c)]) continue;
      const Index nc = nearest[static_cast<std::size_t>(c)];
      if (c == a || nc == a || nc == b) refresh(c);
    }
    descending.push_back(partition_from_assignment(owner));
  }

  path.partitions.assign(descending.rbegin(), descending.rend());
  return path;
}

double goodness_of_fit(const Eigen::Ref<const Matrix>& x, const Eigen::Ref<const Matrix>& scores,
                       const Partition& partition) {
  const Matrix loadings = postgroup_loadings(x, scores, partition);
  const double nt = static_cast<double>(x.rows()) * static_cast<double>(x.cols());
  return (x - scores * loadings.transpose()).squaredNorm() / nt;
}

double goodness_of_fit(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                       const Partition& partition) {
  return goodness_of_fit(panel.values(), scores, partition);
}

double rho_default(int min_group_size, Index t) {
  const double m = static_cast<double>(std::min<Index>(min_group_size, t));
  if (m < 2.0) {
    throw Error(ErrorCode::DegenerateGroup,
                "rho needs min(group size, T) >= 2, got " + std::to_string(static_cast<long>(m)));
  }
  return std::log(m) / m;
}

int default_k_bar(Index n) { return static_cast<int>(std::min<Index>(15, n)); }

GroupSelectionReport select_group_count(const Eigen::Ref<const Matrix>& x,
                                        const Eigen::Ref<const Matrix>& scores,
                                        const AhcPath& path, int k_bar) {
  if (k_bar < 1 || k_bar > x.cols()) {
    throw Error(ErrorCode::InvalidArgument,
                "k_bar=" + std::to_string(k_bar) + " outside [1, N]");
  }
  if (path.n() != x.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "AHC path does not match the panel width");
  }
  GroupSelectionReport report;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_bar; ++k) {
    const Partition& part = path.at(k);
    const double s = goodness_of_fit(x, scores, part);
    if (s == 0.0) {
      throw Error(ErrorCode::ZeroResidual, "S(K) = 0 at K=" + std::to_string(k));
    }
    const double rho = rho_default(std::max(part.min_group_size(), 2), x.rows());
    const double ic = std::log(s) + static_cast<double>(k) * rho;
    report.s_values.push_back(s);
    report.rho_values.push_back(rho);
    report.ic_values.push_back(ic);
    if (ic < best) {
      best = ic;
      report.k_hat = k;
    }
  }
  return report;
}

GroupSelectionReport select_group_count(const Panel& panel, const Eigen::Ref<const Matrix>& scores,
                                        const AhcPath& path, int k_bar) {
  return select_group_count(panel.values(), scores, path, k_bar);
}

}  // namespace factorgroup
