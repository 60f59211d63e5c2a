#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "factorgroup/ospe.hpp"
#include "factorgroup/simlab.hpp"

namespace factorgroup {

enum class OutputFormat { CSV, Markdown };

std::uint64_t fnv1a(std::string_view text);

/// "# factorgroup <version>", "# command: ...", "# seed: ...", "# config: <hex hash>".
/// `config` is a canonical description of every option that affects results.
std::vector<std::string> metadata_lines(const std::string& command, std::uint64_t seed,
                                        const std::string& config);

void write_metadata(std::ostream& out, const std::vector<std::string>& lines);

/// Two rows per configuration: PPCA-initialized and PCA-initialized (TW).
void write_summary(std::ostream& out, const std::vector<RepSummary>& summaries, OutputFormat format,
                   const std::vector<std::string>& metadata);

/// series,b_1..b_r,group
void write_loadings(std::ostream& out, const std::vector<std::string>& series, const Matrix& loadings,
                    const Partition& partition, const std::vector<std::string>& metadata);
/// date,f_1..f_r
void write_scores(std::ostream& out, const std::vector<std::string>& dates, const Matrix& scores,
                  const std::vector<std::string>& metadata);
/// series,group
void write_groups(std::ostream& out, const std::vector<std::string>& series, const Partition& partition,
                  const std::vector<std::string>& metadata);

/// K, IC(K), S(K), rho per candidate, with the selected row marked.
void write_group_report(std::ostream& out, const GroupedModel& model, OutputFormat format,
                        const std::vector<std::string>& metadata);

/// month,ospe_pca,ospe_ppca
void write_ospe(std::ostream& out, const OspeReport& pca, const OspeReport& ppca, OutputFormat format,
                const std::vector<std::string>& metadata);

}  // namespace factorgroup
