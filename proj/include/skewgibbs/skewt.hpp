#pragma once

#include "skewgibbs/distributions.hpp"
#include "skewgibbs/model.hpp"

namespace skewgibbs::skewt {

/// Lower bound on the degrees of freedom. Proposals are truncated to
/// [kVarphiFloor, ∞) so the mixture keeps a finite variance.
inline constexpr double kVarphiFloor = 2.1;

struct TailState {
  Vector gamma;
  double varphi = 10.0;
};

double digamma(double x);
double trigamma(double x);

// ---------------------------------------------------------------------------
// Weighting hooks. Each takes the per-observation weights γ_t; an empty
// weight vector is the skew-normal case and reproduces those formulas
// exactly (multiplying by a unit weight is exact, and both paths run the same
// products).

/// Σ_t γ_t, or T when unweighted.
double weight_total(const Vector& weights, Index t_count);

/// Â_μ = A_μ + (Σ γ_t) Ω.
Matrix mu_posterior_precision(const numerics::SpdMatrix& A_mu, const Matrix& omega,
                              const Vector& weights, Index t_count);

/// b̂_μ = A_μ b_μ + Ω Σ_t γ_t (R_t - Δ Z_t); `r_minus_skew` holds R - Z Δᵀ.
Vector mu_posterior_linear(const numerics::SpdMatrix& A_mu, const Vector& b_mu,
                           const Matrix& omega, const Matrix& r_minus_skew,
                           const Vector& weights);

/// Likelihood contributions to the δ conditional:
///   precision = Σ_t γ_t W_tᵀ Ω W_t,   linear = Σ_t γ_t W_tᵀ Ω R̃_t.
/// Assembled from G = Σ γ_t Z_t Z_tᵀ and C = Σ γ_t R̃_t Z_tᵀ, using
/// (W_tᵀ Ω W_t)[(i,j),(k,l)] = Ω_ik z_jt z_lt.
struct DeltaStats {
  Matrix precision;
  Vector linear;
};
DeltaStats delta_likelihood_stats(const Matrix& omega, const Matrix& Z,
                                  const Matrix& r_centered, const Vector& weights,
                                  const model::DeltaLayout& layout);

/// S = Σ_t γ_t e_t e_tᵀ for residual rows e_t.
Matrix residual_cross_product(const Matrix& e, const Vector& weights);

/// Scale on Â_z = γ_t (I + ΔᵀΩΔ); 1 when unweighted.
inline double latent_precision_scale(const Vector& weights, Index t) {
  return weights.size() == 0 ? 1.0 : weights(t);
}

// ---------------------------------------------------------------------------
// Mixing scalars and degrees of freedom.

/// γ_t | · ~ Ga((φ + 2N)/2, (φ + Z_tᵀZ_t + e_tᵀΩe_t)/2), e_t = R_t - μ - ΔZ_t.
struct GammaConditional {
  double shape;
  double rate;
};
GammaConditional gamma_conditional(const model::ModelParams& params, const Vector& z_t,
                                   const Vector& r_t, double varphi);
double update_gamma_t(const model::ModelParams& params, const model::LatentState& latent,
                      const model::Dataset& data, double varphi, Index t, RngStream& rng);

/// log-target of φ up to a constant:
///   f(φ) = (φT/2 + a - 1) log φ - T log Γ(φ/2) - b̂ φ
/// with b̂ = b + (log 2 / 2) T + ½ Σ_t (γ_t - log γ_t).
struct VarphiTarget {
  double t_count;
  double a_varphi;
  double b_hat;

  static VarphiTarget from_gamma(const Vector& gamma, double a_varphi, double b_varphi);

  double log_density(double varphi) const;
  double gradient(double varphi) const;
  double hessian(double varphi) const;
};

/// Unique maximizer of f by bracketed Newton; |f'(φ*)| < 1e-10 or the
/// bracket has shrunk to rounding level. Throws NoConvergence after 200 steps.
double varphi_mode_find(double t_count, double a_varphi, double b_hat);

struct VarphiMove {
  double value;
  bool accepted;
};

/// Independence Metropolis–Hastings step with proposal
/// N(φ*, -1/f''(φ*)) truncated to [kVarphiFloor, ∞).
VarphiMove update_varphi_mh(double varphi, const Vector& gamma, double a_varphi,
                            double b_varphi, RngStream& rng);

}  // namespace skewgibbs::skewt
