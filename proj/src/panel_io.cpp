#include "factorgroup/panel_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace factorgroup {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell.push_back(ch);
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

bool is_missing(const std::string& cell, double value) {
  return cell.empty() || value == -99.99 || value == -999.0;
}

bool parse_number(const std::string& cell, double& value) {
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

std::string normalize_date(const std::string& text) {
  std::string y, m, d;
  if (text.size() == 8 && all_digits(text)) {
    y = text.substr(0, 4);
    m = text.substr(4, 2);
    d = text.substr(6, 2);
  } else if (text.size() >= 10 && text[4] == '-' && text[7] == '-' &&
             (text.size() == 10 || text[10] == 'T' || text[10] == ' ')) {
    y = text.substr(0, 4);
    m = text.substr(5, 2);
    d = text.substr(8, 2);
  }
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) {
    throw Error(ErrorCode::ParseError, "unrecognized date '" + text + "'");
  }
  const int month = std::stoi(m);
  const int day = std::stoi(d);
  if (month < 1 || month > 12 || day < 1 || day > 31) {
    throw Error(ErrorCode::ParseError, "date out of range '" + text + "'");
  }
  return y + "-" + m + "-" + d;
}

Panel read_csv_panel(std::istream& in, const std::string& date_column, LoadStats* stats) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    header = split_csv_line(line);
    break;
  }
  if (header.size() < 2) {
    throw Error(ErrorCode::ParseError, "missing header row with a date column and series");
  }
  std::size_t date_idx = 0;
  if (!date_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), date_column);
    if (it == header.end()) {
      throw Error(ErrorCode::ParseError, "no column named '" + date_column + "'");
    }
    date_idx = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != date_idx) names.push_back(header[c]);
  }

  struct Row {
    std::string date;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  LoadStats local;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    ++local.rows_read;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + " has " +
                                             std::to_string(cells.size()) + " cells, header has " +
                                             std::to_string(header.size()));
    }
    Row row;
    bool missing = false;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == date_idx) {
        try {
          row.date = normalize_date(cells[c]);
        } catch (const Error& e) {
          throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column '" +
                                                 header[c] + "': " + e.what());
        }
        continue;
      }
      double value = 0.0;
      if (!cells[c].empty() && !parse_number(cells[c], value)) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ", column '" +
                                               header[c] + "': not a number '" + cells[c] + "'");
      }
      if (is_missing(cells[c], value)) missing = true;
      row.values.push_back(value);
    }
    if (missing) {
      ++local.dropped_rows;
      continue;
    }
    rows.push_back(std::move(row));
  }
  if (local.dropped_rows > 0) {
    std::clog << "warning: dropped " << local.dropped_rows
              << " row(s) with missing values\n";
  }
  if (stats) *stats = local;
  if (rows.empty()) throw Error(ErrorCode::NoRowsRemaining, "no complete rows in panel CSV");

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  Matrix values(static_cast<Index>(rows.size()), static_cast<Index>(names.size()));
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r].values[c];
    }
    labels.push_back(rows[r].date);
  }
  return Panel(std::move(values), std::move(labels), std::move(names));
}

Panel load_csv_panel(const std::string& path, const std::string& date_column, LoadStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_csv_panel(in, date_column, stats);
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_panel_csv(std::ostream& out, const Panel& panel,
                     const std::vector<std::string>& metadata) {
  for (const auto& m : metadata) out << "# " << m << '\n';
  out << "date";
  for (const auto& name : panel.series_names()) out << ',' << name;
  out << '\n';
  for (Index t = 0; t < panel.t(); ++t) {
    out << panel.time_labels()[static_cast<std::size_t>(t)];
    for (Index i = 0; i < panel.n(); ++i) out << ',' << format_double(panel.values()(t, i));
    out << '\n';
  }
}

std::pair<Panel, StandardizationParams> standardize(const Panel& panel) {
  const Matrix& x = panel.values();
  const double t = static_cast<double>(x.rows());
  StandardizationParams params;
  params.means = x.colwise().mean().transpose();
  params.sds.resize(x.cols());
  for (Index i = 0; i < x.cols(); ++i) {
    const double ss = (x.col(i).array() - params.means(i)).square().sum();
    params.sds(i) = std::sqrt(ss / (t - 1.0));
    const bool constant = (x.col(i).array() == x(0, i)).all();
    if (constant || !(params.sds(i) > 1e-14 * std::max(1.0, std::abs(params.means(i))))) {
      throw Error(ErrorCode::ZeroVariance, "series '" +
                                               panel.series_names()[static_cast<std::size_t>(i)] +
                                               "' has zero variance");
    }
  }
  Panel scaled(apply_standardization(x, params), panel.time_labels(), panel.series_names());
  return {std::move(scaled), std::move(params)};
}

Matrix apply_standardization(const Eigen::Ref<const Matrix>& values,
                             const StandardizationParams& params) {
  if (values.cols() != params.means.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardization width mismatch");
  }
  return ((values.rowwise() - params.means.transpose()).array().rowwise() /
          params.sds.transpose().array())
      .matrix();
}

Matrix invert_standardization(const Eigen::Ref<const Matrix>& values,
                              const StandardizationParams& params) {
  if (values.cols() != params.means.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardization width mismatch");
  }
  return ((values.array().rowwise() * params.sds.transpose().array()).matrix().rowwise() +
          params.means.transpose());
}

}  // namespace factorgroup
