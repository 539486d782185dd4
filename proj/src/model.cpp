#include "skewgibbs/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "skewgibbs/errors.hpp"

namespace skewgibbs::model {

namespace {

std::string normalize(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '_') c = '-';
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::FullNOWI: return "full-nowi";
    case Variant::LTNOWI: return "lt-nowi";
    case Variant::LTHSGHS: return "lt-hsghs";
  }
  return "unknown";
}

std::string_view to_string(Tail t) {
  return t == Tail::SkewNormal ? "skew-normal" : "skew-t";
}

Variant parse_variant(std::string_view text) {
  const auto s = normalize(text);
  if (s == "full-nowi" || s == "fullnowi") return Variant::FullNOWI;
  if (s == "lt-nowi" || s == "ltnowi") return Variant::LTNOWI;
  if (s == "lt-hsghs" || s == "lthsghs") return Variant::LTHSGHS;
  throw UnknownKind("unknown model variant '" + std::string(text) + "'");
}

Tail parse_tail(std::string_view text) {
  const auto s = normalize(text);
  if (s == "skew-normal" || s == "normal" || s == "sn") return Tail::SkewNormal;
  if (s == "skew-t" || s == "t" || s == "st") return Tail::SkewT;
  throw UnknownKind("unknown tail '" + std::string(text) + "'");
}

int variant_index(Variant v) {
  switch (v) {
    case Variant::FullNOWI: return 0;
    case Variant::LTNOWI: return 1;
    case Variant::LTHSGHS: return 2;
  }
  return 0;
}

Dataset::Dataset(Matrix returns) : r_(std::move(returns)) {
  if (r_.cols() == 0) throw DimensionMismatch("Dataset: N must be positive");
  if (!r_.allFinite()) throw DimensionMismatch("Dataset: non-finite entry");
}

DeltaLayout::DeltaLayout(Shape shape, Index n) : shape_(shape), n_(n) {
  if (n <= 0) throw DimensionMismatch("DeltaLayout: N must be positive");
  for (Index i = 0; i < n; ++i) {
    const Index last = shape == Shape::Full ? n - 1 : i;
    for (Index j = 0; j <= last; ++j) entries_.emplace_back(i, j);
  }
}

DeltaLayout DeltaLayout::for_variant(Variant v, Index n) {
  return DeltaLayout(v == Variant::FullNOWI ? Shape::Full : Shape::LowerTriangular, n);
}

bool DeltaLayout::contains(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  return shape_ == Shape::Full || j <= i;
}

std::optional<Index> DeltaLayout::index_of(Index i, Index j) const {
  if (!contains(i, j)) return std::nullopt;
  return row_offset(i) + j;
}

Index DeltaLayout::row_offset(Index i) const {
  return shape_ == Shape::Full ? i * n_ : i * (i + 1) / 2;
}

Index DeltaLayout::row_length(Index i) const { return shape_ == Shape::Full ? n_ : i + 1; }

Matrix DeltaLayout::to_matrix(const Vector& delta) const {
  if (delta.size() != size()) {
    throw DimensionMismatch("DeltaLayout::to_matrix: expected " + std::to_string(size()) +
                            " entries, got " + std::to_string(delta.size()));
  }
  Matrix m = Matrix::Zero(n_, n_);
  for (Index k = 0; k < size(); ++k) {
    const auto [i, j] = entries_[static_cast<std::size_t>(k)];
    m(i, j) = delta(k);
  }
  return m;
}

Vector DeltaLayout::to_vec(const Matrix& delta) const {
  if (delta.rows() != n_ || delta.cols() != n_) {
    throw DimensionMismatch("DeltaLayout::to_vec: matrix is not N x N");
  }
  Vector v(size());
  for (Index k = 0; k < size(); ++k) {
    const auto [i, j] = entries_[static_cast<std::size_t>(k)];
    v(k) = delta(i, j);
  }
  return v;
}

bool DeltaLayout::respects_pattern(const Matrix& m) const {
  if (m.rows() != n_ || m.cols() != n_) return false;
  for (Index i = 0; i < n_; ++i) {
    for (Index j = 0; j < n_; ++j) {
      if (!contains(i, j) && m(i, j) != 0.0) return false;
    }
  }
  return true;
}

void PriorConfig::validate() const {
  const Index n = b_mu.size();
  if (n == 0) throw DimensionMismatch("prior: b_mu is empty");
  if (A_mu.dim() != n) throw DimensionMismatch("prior: A_mu dimension");
  const Index j = layout().size();
  if (b_delta.size() != j || A_delta.dim() != j) {
    throw DimensionMismatch("prior: delta prior has dimension " +
                            std::to_string(b_delta.size()) + ", layout needs " +
                            std::to_string(j));
  }
  if (S_Omega.dim() != n) throw DimensionMismatch("prior: S_Omega dimension");
  if (!(nu_Omega >= static_cast<double>(n))) {
    throw NonPositiveParameter("prior: nu_Omega must be >= N");
  }
  if (!(a_eta > 0.0) || !(b_eta >= 0.0)) {
    throw NonPositiveParameter("prior: need a_eta > 0 and b_eta >= 0");
  }
  if (!(a_varphi > 0.0) || !(b_varphi > 0.0)) {
    throw NonPositiveParameter("prior: a_varphi and b_varphi must be positive");
  }
}

PriorConfig make_prior(const PriorSettings& s, Index n, Variant variant, Tail tail) {
  if (n <= 0) throw DimensionMismatch("make_prior: N must be positive");
  const double nd = static_cast<double>(n);
  PriorConfig p;
  p.variant = variant;
  p.tail = tail;
  p.b_mu = Vector::Constant(n, s.b_mu);
  p.A_mu = numerics::SpdMatrix::scaled_identity(n, s.A_mu_scale);
  const Index j = DeltaLayout::for_variant(variant, n).size();
  p.b_delta = Vector::Constant(j, s.b_delta);
  p.A_delta = numerics::SpdMatrix::scaled_identity(j, s.A_delta_scale);
  p.S_Omega = numerics::SpdMatrix::scaled_identity(n, s.S_Omega_scale.value_or(nd));
  p.nu_Omega = s.nu_Omega.value_or(nd);
  p.a_eta = s.a_eta;
  p.b_eta = s.b_eta;
  p.a_varphi = s.a_varphi;
  p.b_varphi = s.b_varphi;
  p.validate();
  return p;
}

Matrix build_W(const Vector& z_t, const DeltaLayout& layout) {
  const Index n = layout.n();
  if (z_t.size() != n) {
    throw DimensionMismatch("build_W: Z_t has length " + std::to_string(z_t.size()) +
                            ", layout expects " + std::to_string(n));
  }
  Matrix w = Matrix::Zero(n, layout.size());
  for (Index i = 0; i < n; ++i) {
    const Index offset = layout.row_offset(i);
    for (Index j = 0; j < layout.row_length(i); ++j) w(i, offset + j) = z_t(j);
  }
  return w;
}

Matrix build_W(const Vector& z_t) {
  return build_W(z_t, DeltaLayout(DeltaLayout::Shape::LowerTriangular, z_t.size()));
}

Matrix residuals(const ModelParams& params, const Matrix& Z, const Dataset& data) {
  const Index n = data.N();
  if (params.mu.size() != n || params.delta.rows() != n || params.delta.cols() != n ||
      params.omega.dim() != n || Z.rows() != data.T() || Z.cols() != n) {
    throw DimensionMismatch("residuals: parameter and data dimensions disagree");
  }
  Matrix e = data.R() - Z * params.delta.transpose();
  e.rowwise() -= params.mu.transpose();
  return e;
}

namespace {

bool has_gamma(const LatentState& latent, Index t) {
  if (latent.gamma.size() == 0) return false;
  if (latent.gamma.size() != t) throw DimensionMismatch("loglik: gamma length != T");
  return true;
}

}  // namespace

double loglik(const ModelParams& params, const LatentState& latent, const Dataset& data) {
  const Matrix e = residuals(params, latent.Z, data);
  const Index t_count = data.T();
  const double n = static_cast<double>(data.N());
  const bool weighted = has_gamma(latent, t_count);
  const double log_det = params.omega.log_det();
  const Matrix& omega = params.omega.matrix();
  double total = 0.0;
  for (Index t = 0; t < t_count; ++t) {
    const Vector et = e.row(t).transpose();
    const double g = weighted ? latent.gamma(t) : 1.0;
    double term = -0.5 * n * std::log(2.0 * std::numbers::pi) + 0.5 * log_det;
    if (weighted) term += 0.5 * n * std::log(g);
    term -= 0.5 * g * et.dot(omega * et);
    total += term;
  }
  return total;
}

double loglik_trace_form(const ModelParams& params, const LatentState& latent,
                         const Dataset& data) {
  Matrix e = residuals(params, latent.Z, data);
  const Index t_count = data.T();
  const double n = static_cast<double>(data.N());
  const double tt = static_cast<double>(t_count);
  double log_gamma_sum = 0.0;
  if (has_gamma(latent, t_count)) {
    log_gamma_sum = latent.gamma.array().log().sum();
    e = latent.gamma.array().sqrt().matrix().asDiagonal() * e;
  }
  const Matrix s = e.transpose() * e;
  return -0.5 * tt * n * std::log(2.0 * std::numbers::pi) + 0.5 * tt * params.omega.log_det() +
         0.5 * n * log_gamma_sum - 0.5 * (params.omega.matrix() * s).trace();
}

}  // namespace skewgibbs::model
