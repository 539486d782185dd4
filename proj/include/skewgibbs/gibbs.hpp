#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "skewgibbs/distributions.hpp"
#include "skewgibbs/horseshoe.hpp"
#include "skewgibbs/model.hpp"
#include "skewgibbs/skewt.hpp"

namespace skewgibbs::gibbs {

struct ChainConfig {
  Index burn_in = 0;
  Index draws = 1;
  Index thin = 1;
  bool store_latent = false;
  /// Keep every retained draw (needed for quantiles and chain CSVs). When
  /// false only running means are kept, which long study runs rely on.
  bool store_draws = true;

  void validate() const;
  /// Number of retained draws: every thin-th of `draws`.
  Index stored_count() const { return draws / thin; }
};

/// Everything one chain carries between sweeps.
struct ChainState {
  model::ModelParams params;
  model::LatentState latent;
  horseshoe::DeltaShrinkState delta_shrink;  // LT-HSGHS only
  horseshoe::OmegaShrinkState omega_shrink;  // LT-HSGHS only
  double varphi = 10.0;                      // skew-t only
  Index varphi_accepted = 0;
  Index varphi_proposed = 0;
};

/// Which blocks a sweep refreshes. Turning a block off holds it at its
/// current value; with everything off a sweep is the identity.
struct SweepPlan {
  bool latent = true;
  bool mu = true;
  bool delta = true;
  bool omega = true;
  bool shrinkage = true;
  bool gamma = true;
  bool varphi = true;

  static SweepPlan none() { return {false, false, false, false, false, false, false}; }
};

/// LT-HSGHS sweeps throw NoConvergence once max/min of diag(Ω) exceeds this.
inline constexpr double kMaxPrecisionSpread = 1e10;

/// μ⁰ = 0, Δ⁰ = 0, Ω⁰ = I, Z⁰ = |N(0, 1)|, γ⁰ = 1, φ⁰ = 10; horseshoe scales
/// drawn from their priors under LT-HSGHS.
ChainState initial_state(const model::Dataset& data, const model::PriorConfig& prior,
                         RngStream& rng);

/// Precomputed pieces of the Z_t conditional shared by every t:
/// Â = I + ΔᵀΩΔ and the map Â⁻¹ΔᵀΩ taking R_t - μ to μ_z.
struct LatentConditional {
  Matrix precision;
  Matrix mean_map;

  static LatentConditional from(const model::ModelParams& params);
  Vector mean(const Vector& r_t_centered) const { return mean_map * r_t_centered; }
};

/// Coordinate-wise Gibbs pass over Z_t: for i = 1..N,
///   z_i | z_-i ~ N⁺(μ_i - (1/a_ii) Σ_{k≠i} a_ik (z_k - μ_k), 1/(γ_t a_ii)).
void update_z_elementwise(const LatentConditional& cond, const Vector& mean, double gamma_t,
                          Eigen::Ref<Vector> z_t, RngStream& rng);
void update_z_elementwise(const model::ModelParams& params, const model::Dataset& data, Index t,
                          Eigen::Ref<Vector> z_t, RngStream& rng);

Vector update_mu(const model::ModelParams& params, const model::LatentState& latent,
                 const model::Dataset& data, const model::PriorConfig& prior, RngStream& rng);

/// Draw of δ under `layout`. `override_prior` replaces (A_δ, b_δ) from the
/// prior config; the horseshoe injects its diagonal precision this way.
Vector update_delta_vec(const model::ModelParams& params, const model::LatentState& latent,
                        const model::Dataset& data, const model::DeltaLayout& layout,
                        const model::GaussianPrior& delta_prior, RngStream& rng);

/// Full-NOWI: all N² entries through the vectorized normal update.
Matrix update_delta_full(const model::ModelParams& params, const model::LatentState& latent,
                         const model::Dataset& data, const model::PriorConfig& prior,
                         RngStream& rng);

/// LT variants: δ of length N(N+1)/2.
Vector update_delta_lt(const model::ModelParams& params, const model::LatentState& latent,
                       const model::Dataset& data, const model::PriorConfig& prior,
                       RngStream& rng,
                       const std::optional<model::GaussianPrior>& override_prior = std::nullopt);

/// Ω | · ~ W((S_Ω + S)⁻¹, ν_Ω + T).
numerics::SpdMatrix update_omega_wishart(const model::ModelParams& params,
                                         const model::LatentState& latent,
                                         const model::Dataset& data,
                                         const model::PriorConfig& prior, RngStream& rng);

/// One scan in the order Z → μ → Δ/δ → Ω → shrinkage → γ → φ.
void gibbs_sweep(ChainState& state, const model::Dataset& data, const model::PriorConfig& prior,
                 RngStream& rng, const SweepPlan& plan = {});

struct Quantiles {
  Vector q025;
  Vector q500;
  Vector q975;
};

/// Retained draws. Scalars per draw follow the chain CSV column order
/// (see io::chain_header).
struct DrawBuffer {
  std::vector<Vector> mu;
  std::vector<Matrix> delta;
  std::vector<Matrix> omega;
  std::vector<double> varphi;
  std::vector<Matrix> latent;

  std::size_t size() const { return mu.size(); }
};

struct ChainSummary {
  model::Variant variant = model::Variant::LTNOWI;
  model::Tail tail = model::Tail::SkewNormal;
  Vector mu_mean;
  Matrix delta_mean;
  Matrix omega_mean;
  std::optional<double> varphi_mean;
  /// Per-scalar quantiles in chain-column order.
  Quantiles quantiles;
  Index stored_draws = 0;
  Index iterations = 0;
  double varphi_acceptance = 0.0;
  double wall_seconds = 0.0;
  DrawBuffer draws;
};

/// Called after every retained draw; index counts retained draws from 0.
using DrawObserver = std::function<void(Index, const ChainState&)>;

/// Runs burn_in sweeps, then `draws` sweeps keeping every thin-th. Failures
/// are rethrown as skewgibbs::Error naming the sweep index.
ChainSummary run_chain(const model::Dataset& data, const model::PriorConfig& prior,
                       const ChainConfig& config, RngStream& rng, const SweepPlan& plan = {},
                       const DrawObserver& observer = {});
/// Same, starting from a caller-supplied state.
ChainSummary run_chain_from(ChainState state, const model::Dataset& data,
                            const model::PriorConfig& prior, const ChainConfig& config,
                            RngStream& rng, const SweepPlan& plan = {},
                            const DrawObserver& observer = {});

/// Summary statistics of an existing draw buffer.
ChainSummary summarize_draws(DrawBuffer draws, model::Variant variant, model::Tail tail);

/// Flattens one draw into chain-column order: μ, free δ entries, Ω row-major, φ.
Vector flatten_draw(const Vector& mu, const Matrix& delta, const Matrix& omega,
                    const model::DeltaLayout& layout, std::optional<double> varphi);

}  // namespace skewgibbs::gibbs
