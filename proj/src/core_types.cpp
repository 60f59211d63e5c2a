#include "factorgroup/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace factorgroup {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::EmptyAssignment: return "EmptyAssignment";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::DegenerateGroup: return "DegenerateGroup";
    case ErrorCode::ZeroResidual: return "ZeroResidual";
    case ErrorCode::SingularLoadings: return "SingularLoadings";
    case ErrorCode::InsufficientRows: return "InsufficientRows";
    case ErrorCode::IndivisibleGroups: return "IndivisibleGroups";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NoRowsRemaining: return "NoRowsRemaining";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyMonth: return "EmptyMonth";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

std::string to_string(FitMethod method) {
  switch (method) {
    case FitMethod::PCA: return "PCA";
    case FitMethod::PPCA: return "PPCA";
    case FitMethod::POSTGROUP: return "POSTGROUP";
  }
  return "Unknown";
}

Panel::Panel(Matrix values, std::vector<std::string> time_labels,
             std::vector<std::string> series_names)
    : values_(std::move(values)),
      time_labels_(std::move(time_labels)),
      series_names_(std::move(series_names)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "panel needs T >= 2 and N >= 2, got " + std::to_string(values_.rows()) +
                    " x " + std::to_string(values_.cols()));
  }
  if (static_cast<Index>(time_labels_.size()) != values_.rows()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(time_labels_.size()) + " time labels for " +
                    std::to_string(values_.rows()) + " rows");
  }
  if (static_cast<Index>(series_names_.size()) != values_.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::to_string(series_names_.size()) + " series names for " +
                    std::to_string(values_.cols()) + " columns");
  }
  for (Index t = 0; t < values_.rows(); ++t) {
    for (Index i = 0; i < values_.cols(); ++i) {
      if (!std::isfinite(values_(t, i))) {
        throw Error(ErrorCode::NonFiniteEntry, "entry (" + std::to_string(t) + ", " +
                                                   std::to_string(i) + ") is not finite");
      }
    }
  }
}

Panel Panel::from_matrix(Matrix values) {
  std::vector<std::string> times(static_cast<std::size_t>(values.rows()));
  std::vector<std::string> names(static_cast<std::size_t>(values.cols()));
  for (std::size_t t = 0; t < times.size(); ++t) times[t] = "t" + std::to_string(t + 1);
  for (std::size_t i = 0; i < names.size(); ++i) names[i] = "s" + std::to_string(i + 1);
  return Panel(std::move(values), std::move(times), std::move(names));
}

Panel Panel::rows(const std::vector<Index>& row_indices) const {
  Matrix sub(static_cast<Index>(row_indices.size()), values_.cols());
  std::vector<std::string> labels;
  labels.reserve(row_indices.size());
  for (std::size_t k = 0; k < row_indices.size(); ++k) {
    sub.row(static_cast<Index>(k)) = values_.row(row_indices[k]);
    labels.push_back(time_labels_[static_cast<std::size_t>(row_indices[k])]);
  }
  return Panel(std::move(sub), std::move(labels), series_names_);
}

Panel make_panel(Matrix values, std::vector<std::string> time_labels,
                 std::vector<std::string> series_names) {
  return Panel(std::move(values), std::move(time_labels), std::move(series_names));
}

int Partition::min_group_size() const {
  return *std::min_element(sizes_.begin(), sizes_.end());
}

std::vector<std::vector<Index>> Partition::members() const {
  std::vector<std::vector<Index>> groups(static_cast<std::size_t>(k_));
  for (std::size_t i = 0; i < assignment_.size(); ++i) {
    groups[static_cast<std::size_t>(assignment_[i] - 1)].push_back(static_cast<Index>(i));
  }
  return groups;
}

Partition partition_from_assignment(const std::vector<int>& assignment) {
  if (assignment.empty()) {
    throw Error(ErrorCode::EmptyAssignment, "assignment has no entries");
  }
  Partition p;
  p.assignment_.reserve(assignment.size());
  const auto [lo, hi] = std::minmax_element(assignment.begin(), assignment.end());
  if (*lo >= 0 && static_cast<std::size_t>(*hi) < 4 * assignment.size() + 16) {
    std::vector<int> relabel(static_cast<std::size_t>(*hi) + 1, 0);
    for (int id : assignment) {
      int& label = relabel[static_cast<std::size_t>(id)];
      if (label == 0) {
        p.sizes_.push_back(0);
        label = static_cast<int>(p.sizes_.size());
      }
      p.assignment_.push_back(label);
      ++p.sizes_[static_cast<std::size_t>(label - 1)];
    }
  } else {
    std::unordered_map<int, int> relabel;
    for (int id : assignment) {
      auto [it, inserted] = relabel.try_emplace(id, static_cast<int>(relabel.size()) + 1);
      if (inserted) p.sizes_.push_back(0);
      p.assignment_.push_back(it->second);
      ++p.sizes_[static_cast<std::size_t>(it->second - 1)];
    }
  }
  p.k_ = static_cast<int>(p.sizes_.size());
  return p;
}

DistanceMatrix::DistanceMatrix(Matrix d) : d_(std::move(d)) {
  if (d_.rows() != d_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "distance matrix must be square");
  }
  for (Index i = 0; i < d_.rows(); ++i) {
    if (d_(i, i) != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "distance matrix diagonal must be zero");
    }
    for (Index j = 0; j < d_.cols(); ++j) {
      if (!std::isfinite(d_(i, j)) || d_(i, j) < 0.0 || d_(i, j) != d_(j, i)) {
        throw Error(ErrorCode::InvalidArgument,
                    "distance matrix must be finite, nonnegative and symmetric");
      }
    }
  }
}

}  // namespace factorgroup
