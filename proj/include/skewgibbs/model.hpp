#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skewgibbs/numerics.hpp"

namespace skewgibbs::model {

/// Estimation variants.
///   FullNOWI: unrestricted Δ, normal prior on vec(Δ), Wishart prior on Ω.
///   LTNOWI:   lower-triangular Δ, normal prior on δ, Wishart prior on Ω.
///   LTHSGHS:  lower-triangular Δ, horseshoe on δ, graphical horseshoe on Ω.
enum class Variant { FullNOWI, LTNOWI, LTHSGHS };
enum class Tail { SkewNormal, SkewT };

std::string_view to_string(Variant v);
std::string_view to_string(Tail t);
/// Accepts "full-nowi", "lt-nowi", "lt-hsghs" (case-insensitive, '_' or '-').
Variant parse_variant(std::string_view text);
Tail parse_tail(std::string_view text);
/// Position of a variant in {FullNOWI, LTNOWI, LTHSGHS}; used for stream ids.
int variant_index(Variant v);

/// T x N observations, one row per R_t.
class Dataset {
 public:
  Dataset() = default;
  /// Throws DimensionMismatch on a non-finite entry or N == 0.
  explicit Dataset(Matrix returns);

  Index T() const { return r_.rows(); }
  Index N() const { return r_.cols(); }
  const Matrix& R() const { return r_; }

 private:
  Matrix r_;
};

/// Index map between Δ positions and the stacked vector δ.
///
/// Entries are ordered row by row: (1,1), (2,1), (2,2), (3,1), ... for the
/// lower-triangular shape and (1,1), (1,2), ..., (N,N) for the full shape. Row
/// i of the design block W_t then covers a contiguous run of δ.
class DeltaLayout {
 public:
  enum class Shape { Full, LowerTriangular };

  DeltaLayout(Shape shape, Index n);
  static DeltaLayout for_variant(Variant v, Index n);

  Shape shape() const { return shape_; }
  Index n() const { return n_; }
  /// N² (full) or N(N+1)/2 (lower triangular).
  Index size() const { return static_cast<Index>(entries_.size()); }
  bool contains(Index i, Index j) const;
  /// Position of (i, j) in δ; nullopt for a structural zero.
  std::optional<Index> index_of(Index i, Index j) const;
  /// First δ position belonging to row i, and how many follow.
  Index row_offset(Index i) const;
  Index row_length(Index i) const;
  const std::vector<std::pair<Index, Index>>& entries() const { return entries_; }

  Matrix to_matrix(const Vector& delta) const;
  /// Reads the free entries of `delta`; structural zeros are ignored.
  Vector to_vec(const Matrix& delta) const;
  /// True when every structural-zero position of `m` is exactly 0.
  bool respects_pattern(const Matrix& m) const;

 private:
  Shape shape_;
  Index n_;
  std::vector<std::pair<Index, Index>> entries_;
};

struct ModelParams {
  Vector mu;
  Matrix delta;
  numerics::SpdMatrix omega;
};

/// Z (T x N, nonnegative) and, under the skew-t tail only, the mixing
/// scalars γ (length T). gamma is empty for skew-normal.
struct LatentState {
  Matrix Z;
  Vector gamma;
};

/// Normal prior in canonical form: precision A and mean b, entering the
/// posterior as Â = A + ..., b̂ = A b + ....
struct GaussianPrior {
  Matrix precision;
  Vector mean;
};

/// Scalar knobs that expand into a PriorConfig. Unset S_Omega_scale and
/// nu_Omega default to N.
struct PriorSettings {
  double b_mu = 0.0;
  double A_mu_scale = 0.01;
  double b_delta = 0.0;
  double A_delta_scale = 0.01;
  std::optional<double> S_Omega_scale;
  std::optional<double> nu_Omega;
  double a_eta = 1.0;
  double b_eta = 0.0;
  double a_varphi = 2.0;
  double b_varphi = 0.1;

  bool operator==(const PriorSettings&) const = default;
};

struct PriorConfig {
  Vector b_mu;
  numerics::SpdMatrix A_mu;
  Vector b_delta;
  numerics::SpdMatrix A_delta;
  numerics::SpdMatrix S_Omega;
  double nu_Omega = 0.0;
  double a_eta = 1.0;
  double b_eta = 0.0;
  double a_varphi = 2.0;
  double b_varphi = 0.1;
  Variant variant = Variant::LTNOWI;
  Tail tail = Tail::SkewNormal;

  Index n() const { return b_mu.size(); }
  DeltaLayout layout() const { return DeltaLayout::for_variant(variant, n()); }
  /// Throws DimensionMismatch / NonPositiveParameter on violated invariants.
  void validate() const;
};

PriorConfig make_prior(const PriorSettings& settings, Index n, Variant variant,
                       Tail tail = Tail::SkewNormal);

/// Design block W_t with Δ Z_t = W_t δ; N rows, layout.size() columns.
Matrix build_W(const Vector& z_t, const DeltaLayout& layout);
/// Lower-triangular layout, the form used by the LT variants.
Matrix build_W(const Vector& z_t);

/// R - 1 μᵀ - Z Δᵀ.
Matrix residuals(const ModelParams& params, const Matrix& Z, const Dataset& data);

/// log p(R | μ, Δ, Ω, Z) including (2π)^{-TN/2}, summed observation by
/// observation. With latent.gamma present each row uses precision γ_t Ω.
double loglik(const ModelParams& params, const LatentState& latent, const Dataset& data);
/// Same quantity through tr{Ω (R̃ - ZΔᵀ)ᵀ(R̃ - ZΔᵀ)}.
double loglik_trace_form(const ModelParams& params, const LatentState& latent,
                         const Dataset& data);

}  // namespace skewgibbs::model
