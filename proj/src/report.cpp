#include "factorgroup/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "factorgroup/panel_io.hpp"
#include "factorgroup/version.hpp"

namespace factorgroup {
namespace {

std::string fixed(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  // keep "-0.0000" out of the tables
  std::string text(buf);
  if (text.find_first_not_of("-0.") == std::string::npos && text[0] == '-') text.erase(0, 1);
  return text;
}

using Row = std::vector<std::string>;

void emit_table(std::ostream& out, const Row& header, const std::vector<Row>& rows, OutputFormat format) {
  if (format == OutputFormat::CSV) {
    auto line = [&](const Row& row) {
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
      out << '\n';
    };
    line(header);
    for (const auto& row : rows) line(row);
    return;
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t j = 0; j < header.size(); ++j) width[j] = header[j].size();
  for (const auto& row : rows)
    for (std::size_t j = 0; j < row.size(); ++j) width[j] = std::max(width[j], row[j].size());
  auto line = [&](const Row& row) {
    out << '|';
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << ' ' << row[j] << std::string(width[j] - row[j].size(), ' ') << " |";
    }
    out << '\n';
  };
  line(header);
  out << '|';
  for (std::size_t j = 0; j < header.size(); ++j) out << std::string(width[j] + 2, '-') << '|';
  out << '\n';
  for (const auto& row : rows) line(row);
}

Row summary_row(const RepSummary& s, const std::string& method, const MethodSummary& m, double mse_initial) {
  const auto& c = s.config;
  return {to_string(c.scenario),
          std::to_string(c.t),
          std::to_string(c.n),
          format_double(c.kappa),
          method,
          std::to_string(s.n_reps),
          std::to_string(s.n_failures),
          fixed(m.k_hat_mean, 3),
          std::to_string(m.freq_under) + "|" + std::to_string(m.freq_over),
          fixed(m.rand, 4),
          fixed(m.arand, 4),
          fixed(m.jaccard, 4),
          fixed(m.purity, 4),
          fixed(m.subspace_dist, 4),
          fixed(m.mse_postgroup, 4),
          fixed(mse_initial, 4),
          fixed(s.lambda_mean, 6),
          std::to_string(s.r_hat_correct)};
}

}  // namespace

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::vector<std::string> metadata_lines(const std::string& command, std::uint64_t seed,
                                        const std::string& config) {
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(fnv1a(config)));
  return {std::string("factorgroup ") + kVersion, "command: " + command,
          "seed: " + std::to_string(seed), std::string("config: ") + hash};
}

void write_metadata(std::ostream& out, const std::vector<std::string>& lines) {
  for (const auto& line : lines) out << "# " << line << '\n';
}

void write_summary(std::ostream& out, const std::vector<RepSummary>& summaries, OutputFormat format,
                   const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  const Row header = {"scenario", "T",      "N",       "kappa",  "initial", "reps",
                      "failures", "K_mean", "Freq",    "Rand",   "aRand",   "Jaccard",
                      "Purity",   "D",      "MSE",     "MSE_initial", "lambda_mean", "r_hat_correct"};
  std::vector<Row> rows;
  for (const auto& s : summaries) {
    MethodSummary ppca;
    ppca.k_hat_mean = s.k_hat_mean;
    ppca.freq_under = s.freq_under;
    ppca.freq_over = s.freq_over;
    ppca.rand = s.rand;
    ppca.arand = s.arand;
    ppca.jaccard = s.jaccard;
    ppca.purity = s.purity;
    ppca.subspace_dist = s.subspace_dist;
    ppca.mse_postgroup = s.mse_postgroup;
    rows.push_back(summary_row(s, "PPCA", ppca, s.mse_ppca));
    rows.push_back(summary_row(s, "PCA", s.tw, s.mse_pca));
  }
  emit_table(out, header, rows, format);
}

void write_loadings(std::ostream& out, const std::vector<std::string>& series, const Matrix& loadings,
                    const Partition& partition, const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "series";
  for (Index j = 0; j < loadings.cols(); ++j) out << ",b_" << j + 1;
  out << ",group\n";
  for (Index i = 0; i < loadings.rows(); ++i) {
    out << series[static_cast<std::size_t>(i)];
    for (Index j = 0; j < loadings.cols(); ++j) out << ',' << format_double(loadings(i, j));
    out << ',' << partition.assignment()[static_cast<std::size_t>(i)] << '\n';
  }
}

void write_scores(std::ostream& out, const std::vector<std::string>& dates, const Matrix& scores,
                  const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "date";
  for (Index j = 0; j < scores.cols(); ++j) out << ",f_" << j + 1;
  out << '\n';
  for (Index t = 0; t < scores.rows(); ++t) {
    out << dates[static_cast<std::size_t>(t)];
    for (Index j = 0; j < scores.cols(); ++j) out << ',' << format_double(scores(t, j));
    out << '\n';
  }
}

void write_groups(std::ostream& out, const std::vector<std::string>& series, const Partition& partition,
                  const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  out << "series,group\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series[i] << ',' << partition.assignment()[i] << '\n';
  }
}

void write_group_report(std::ostream& out, const GroupedModel& model, OutputFormat format,
                        const std::vector<std::string>& metadata) {
  write_metadata(out, metadata);
  const auto& sel = model.selection;
  std::vector<Row> rows;
  for (std::size_t k = 0; k < sel.ic_values.size(); ++k) {
    const int groups = static_cast<int>(k) + 1;
    rows.push_back({std::to_string(groups), format_double(sel.ic_values[k]),
                    format_double(sel.s_values[k]), format_double(sel.rho_values[k]),
                    std::to_string(model.path.at(groups).min_group_size()),
                    groups == sel.k_hat ? "*" : ""});
  }
  emit_table(out, {"K", "IC", "S", "rho", "min_size", "selected"}, rows, format);
}

void write_ospe(std::ostream& out, const OspeReport& pca, const OspeReport& ppca, OutputFormat format,
                const std::vector<std::string>& metadata) {
  if (pca.months != ppca.months) {
    throw Error(ErrorCode::LengthMismatch, "OSPE reports cover different months");
  }
  write_metadata(out, metadata);
  out << "# scale: " << ppca.scale << '\n';
  std::vector<Row> rows;
  for (std::size_t m = 0; m < ppca.months.size(); ++m) {
    rows.push_back({ppca.months[m], fixed(pca.ospe[m], 4), fixed(ppca.ospe[m], 4)});
  }
  emit_table(out, {"month", "ospe_pca", "ospe_ppca"}, rows, format);
}

}  // namespace factorgroup
