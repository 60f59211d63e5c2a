#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "factorgroup/core_types.hpp"

namespace factorgroup {

struct LoadStats {
  std::size_t rows_read = 0;
  std::size_t dropped_rows = 0;  // rows with empty or sentinel (-99.99, -999) cells
};

/// Reads a panel CSV: a header row, one date column (ISO-8601 YYYY-MM-DD or
/// YYYYMMDD; the first column unless `date_column` names another), and
/// numeric series in the remaining columns. Lines starting with '#' are
/// skipped. Rows with missing values are dropped with a warning on stderr,
/// rows are sorted by date, and time labels are normalized to YYYY-MM-DD.
Panel load_csv_panel(const std::string& path, const std::string& date_column = "",
                     LoadStats* stats = nullptr);
Panel read_csv_panel(std::istream& in, const std::string& date_column = "",
                     LoadStats* stats = nullptr);

/// "YYYY-MM-DD" from either accepted date spelling; throws ParseError otherwise.
std::string normalize_date(const std::string& text);

/// Panel as CSV: header "date,<series...>", one row per time label.
/// `metadata` lines are emitted first, each prefixed with "# ".
void write_panel_csv(std::ostream& out, const Panel& panel,
                     const std::vector<std::string>& metadata = {});

struct StandardizationParams {
  Vector means;
  Vector sds;  // sample standard deviations (denominator T - 1), all > 0
};

/// Column-wise z-scores; throws ZeroVariance naming the first constant series.
std::pair<Panel, StandardizationParams> standardize(const Panel& panel);

Matrix apply_standardization(const Eigen::Ref<const Matrix>& values,
                             const StandardizationParams& params);
Matrix invert_standardization(const Eigen::Ref<const Matrix>& values,
                              const StandardizationParams& params);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace factorgroup
