#pragma once

#include <string>
#include <vector>

#include "factorgroup/panel_io.hpp"
#include "factorgroup/pipeline.hpp"

namespace factorgroup {

enum class OspeMethod { PCA_TW, PPCA };

std::string to_string(OspeMethod method);

struct OspeReport {
  OspeMethod method = OspeMethod::PPCA;
  std::vector<std::string> months;  // "YYYY-MM"
  std::vector<double> ospe;
  // Diagnostics per evaluated month.
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> eval_rows;
  std::vector<int> r_hat;
  std::vector<int> k_hat;
  std::vector<double> lambda;
  // Errors are measured on the z-score scale of each month's training window.
  std::string scale = "standardized";
};

/// Mean squared error of projecting each row of x_eval on span(loadings):
/// f_t = (B^T B)^{-1} B^T x_t, x^_t = B f_t, OSPE = sum (x - x^)^2 / (N |tau|).
double monthly_ospe(const Eigen::Ref<const Matrix>& x_eval, const Eigen::Ref<const Matrix>& loadings);

/// Expanding-window evaluation. The first window holds the rows dated in
/// [train_start, train_end]; each evaluated month is appended to the window
/// after it is scored. For every month the window is z-scored, the grouped
/// model is refit (IC2 factor count; lambda by CV for PPCA, 0 for PCA_TW),
/// and the month's rows, scaled with the window's parameters, are regressed
/// on the group-mean loadings.
OspeReport ospe_rolling(const Panel& panel, const std::string& train_start,
                        const std::string& train_end, const std::vector<std::string>& eval_months,
                        OspeMethod method, const PipelineOptions& options = {});

/// Every "YYYY-MM" month from `first_month` through `last_month` (YYYY-MM or YYYYMM).
std::vector<std::string> month_range(const std::string& first_month, const std::string& last_month);

}  // namespace factorgroup
