#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "skewgibbs/gibbs.hpp"

namespace skewgibbs::simstudy {

enum class DesignKind { Diag, Sparse, Dense };

std::string_view to_string(DesignKind k);
DesignKind parse_design(std::string_view text);

/// True skewness matrices. All share the diagonal +2, -2, +2, ... ;
/// Sparse adds -1 on the first subdiagonal, Dense additionally fills the rest
/// of the lower triangle with 1.
Matrix make_delta_design(DesignKind kind, Index n);

/// T rows of R_t = μ + Δ Z_t + ε_t with Z_t ~ N⁺(0, I), ε_t ~ N(0, Ω⁻¹).
/// With `varphi` set, draws γ_t ~ Ga(φ/2, φ/2) and uses Z_t ~ N⁺(0, I/γ_t),
/// ε_t ~ N(0, (γ_t Ω)⁻¹).
model::Dataset simulate_data(const Vector& mu, const Matrix& delta,
                             const numerics::SpdMatrix& omega, Index t_count, RngStream& rng,
                             std::optional<double> varphi = std::nullopt);

/// √Σ(estimate_ij - truth_ij)².
double frobenius_loss(const Matrix& estimate, const Matrix& truth);

/// Mean over columns of the Shannon entropy (nats) of the row holding each
/// column's largest |Δ_ij|, pooled over all supplied draws. Zero when every
/// draw assigns every column to the same row.
double column_assignment_entropy(const std::vector<Matrix>& deltas);

// Seeding contract. Every job uses seed = base_seed + 1000003 * design_index.
// Chains run on stream rep * 16 + variant_index (0, 1, 2); the dataset of a
// replication is drawn on stream rep * 16 + kDataStreamSlot, so all variants
// within a replication see the same data.
inline constexpr std::uint64_t kStreamsPerReplication = 16;
inline constexpr std::uint64_t kDataStreamSlot = 15;
std::uint64_t design_seed(std::uint64_t base_seed, DesignKind kind);
std::uint64_t chain_stream(Index rep, model::Variant v);
std::uint64_t data_stream(Index rep);

struct StudyConfig {
  std::vector<DesignKind> designs{DesignKind::Diag, DesignKind::Sparse, DesignKind::Dense};
  std::vector<model::Variant> variants{model::Variant::FullNOWI, model::Variant::LTNOWI,
                                       model::Variant::LTHSGHS};
  Index T = 600;
  Index N = 6;
  Index reps = 5;
  gibbs::ChainConfig chain{3000, 6000, 1, false};
  model::PriorSettings prior;
  std::uint64_t base_seed = 20240101;
  unsigned workers = 1;

  /// Paper-scale settings: N = 15, T = 1500, 30 replications, 50k + 100k.
  static StudyConfig full_scale();
  void validate() const;
};

struct JobResult {
  DesignKind design = DesignKind::Diag;
  model::Variant variant = model::Variant::LTNOWI;
  Index rep = 0;
  bool ok = false;
  std::string error;
  double delta_loss = 0.0;
  double omega_loss = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  Index iterations = 0;
  double seconds = 0.0;
  Matrix delta_mean;
  Matrix omega_mean;
};

struct CellSummary {
  DesignKind design = DesignKind::Diag;
  model::Variant variant = model::Variant::LTNOWI;
  Index reps_ok = 0;
  double median_delta_loss = 0.0;
  double se_delta_loss = 0.0;
  double median_omega_loss = 0.0;
  double se_omega_loss = 0.0;
};

struct StudyReport {
  StudyConfig config;
  std::vector<JobResult> jobs;
  std::vector<CellSummary> cells;
  double wall_seconds = 0.0;

  const CellSummary& cell(DesignKind d, model::Variant v) const;
};

/// Median of a non-empty sample.
double median(std::vector<double> values);
/// Standard deviation / √n; zero for n < 2.
double standard_error(const std::vector<double>& values);

/// Job list in canonical order: design, then replication, then variant.
std::vector<JobResult> plan_jobs(const StudyConfig& config);
/// Runs one job in place (fills losses, timing, estimates; errors captured).
void run_job(const StudyConfig& config, JobResult& job);
/// Aggregates jobs into per-(design, variant) cells, ordered like `config`.
std::vector<CellSummary> aggregate(const StudyConfig& config, const std::vector<JobResult>& jobs);

/// Runs every job on up to config.workers threads; the report is a pure
/// function of config apart from timings.
StudyReport run_study(const StudyConfig& config);

}  // namespace skewgibbs::simstudy
