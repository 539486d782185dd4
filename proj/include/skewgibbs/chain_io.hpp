#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "skewgibbs/gibbs.hpp"
#include "skewgibbs/simstudy.hpp"

namespace skewgibbs::io {

/// Column names: draw, mu[i], delta[i][j] (free entries in layout order),
/// omega[i][j] row-major, then varphi when present. Indices are 1-based.
std::vector<std::string> chain_header(const model::DeltaLayout& layout, bool has_varphi);

/// %.17g: enough digits for any double to survive a text round trip.
std::string format_double(double x);

/// Writes `content` to a sibling temp file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

struct ChainTable {
  model::DeltaLayout layout{model::DeltaLayout::Shape::LowerTriangular, 1};
  bool has_varphi = false;
  gibbs::DrawBuffer draws;
};

void write_chain(const std::filesystem::path& path, const gibbs::DrawBuffer& draws,
                 const model::DeltaLayout& layout);
/// Throws IoError if unreadable, FormatError(line) on a malformed header or row.
ChainTable read_chain(const std::filesystem::path& path);

/// Plain numeric matrix, comma separated, no header.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// parameter,mean,q025,q500,q975 in chain-column order.
void write_summary_csv(const std::filesystem::path& path, const gibbs::ChainSummary& summary,
                       const model::DeltaLayout& layout);

/// posterior_mean_{mu,delta,omega}.csv (+ posterior_mean_varphi.csv) under dir,
/// each name optionally prefixed.
void write_posterior_means(const std::filesystem::path& dir, const gibbs::ChainSummary& summary,
                           const std::string& prefix = "");

void write_study_jobs_csv(const std::filesystem::path& path,
                          const std::vector<simstudy::JobResult>& jobs);
void write_study_summary_csv(const std::filesystem::path& path,
                             const std::vector<simstudy::CellSummary>& cells);

}  // namespace skewgibbs::io
