#pragma once

#include "skewgibbs/distributions.hpp"
#include "skewgibbs/model.hpp"

namespace skewgibbs::horseshoe {

/// Horseshoe hierarchy on δ in its inverse-gamma mixture form:
///   δ_j ~ N(0, λ_j² τ²),  λ_j² | ν_j ~ IG(1/2, 1/ν_j),  τ² | ξ ~ IG(1/2, 1/ξ),
///   ν_j, ξ ~ IG(1/2, 1).
struct DeltaShrinkState {
  Vector lambda2;
  double tau2 = 1.0;
  Vector nu;
  double xi = 1.0;

  static DeltaShrinkState draw_prior(Index size, RngStream& rng);
  bool valid() const;
};

/// Graphical horseshoe on the off-diagonal entries of Ω. rho2 and upsilon are
/// N x N with only the strict upper triangle (i < j) meaningful; the lower
/// triangle mirrors it and the diagonal is unused.
struct OmegaShrinkState {
  Matrix rho2;
  double psi2 = 1.0;
  Matrix upsilon;
  double zeta = 1.0;

  static OmegaShrinkState draw_prior(Index n, RngStream& rng);
  bool valid() const;
  double rho2_at(Index i, Index j) const { return i < j ? rho2(i, j) : rho2(j, i); }
};

DeltaShrinkState update_delta_shrink(const Vector& delta, const DeltaShrinkState& state,
                                     RngStream& rng);

/// A_δ = (1/τ²) diag(1/λ_j²), b_δ = 0.
model::GaussianPrior build_horseshoe_prior_precision(const DeltaShrinkState& state);

/// η | · ~ Ga(a_η + T/2, b_η + s11/2).
double update_eta(double s11, double t_count, double a_eta, double b_eta, RngStream& rng);

/// One-dimensional restriction of the ω21 conditional to the line ω21 + κα:
/// κ ~ N(mean, variance) on (lo, hi), where (lo, hi) is where the line stays
/// inside {x : xᵀ Ω22⁻¹ x < ω11}.
struct HitAndRunLine {
  double mean;
  double variance;
  double lo;
  double hi;
};

/// `a_hat` is Â_ω = A_ω + s11 Ω22⁻¹.
HitAndRunLine line_restriction(const Vector& omega21, double omega11, const Matrix& omega22_inv,
                               const Vector& s21, const Matrix& a_hat, const Vector& alpha);

/// One Hit-and-Run move targeting N(-Â_ω⁻¹ s21, Â_ω⁻¹) truncated to
/// {ω21 : ω21ᵀ Ω22⁻¹ ω21 < ω11}, with Â_ω = diag(a_omega_diag) + s11 Ω22⁻¹.
/// Throws InfeasibleStart when the current point is not strictly inside.
Vector hit_and_run_omega21(const Vector& omega21, double omega11,
                           const numerics::SpdMatrix& omega22_inv, const Vector& s21, double s11,
                           const Vector& a_omega_diag, RngStream& rng);

/// Positive-definiteness-preserving block sweep over every pivot of Ω:
/// draw η, set ω11 = η + ω21ᵀΩ22⁻¹ω21 with the current ω21, then move ω21
/// once by Hit-and-Run with A_ω = (1/ψ²) diag(1/ρ²_·j). S is the residual
/// cross-product, t_count the number of observations.
void ghs_block_sweep(Matrix& omega, const Matrix& s, const OmegaShrinkState& shrink,
                     double t_count, double a_eta, double b_eta, RngStream& rng);

OmegaShrinkState update_omega_shrink(const Matrix& omega, const OmegaShrinkState& state,
                                     RngStream& rng);

}  // namespace skewgibbs::horseshoe
