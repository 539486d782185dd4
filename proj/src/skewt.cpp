#include "skewgibbs/skewt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

namespace skewgibbs::skewt {

double digamma(double x) { return boost::math::digamma(x); }
double trigamma(double x) { return boost::math::trigamma(x); }

namespace {

void check_weights(const Vector& weights, Index t_count) {
  if (weights.size() != 0 && weights.size() != t_count) {
    throw DimensionMismatch("weights length " + std::to_string(weights.size()) +
                            " != T " + std::to_string(t_count));
  }
}

// Rows scaled by the weights; an unweighted call returns a plain copy so both
// branches feed identical products.
Matrix scale_rows(const Matrix& m, const Vector& weights) {
  if (weights.size() == 0) return m;
  return weights.asDiagonal() * m;
}

}  // namespace

double weight_total(const Vector& weights, Index t_count) {
  check_weights(weights, t_count);
  return weights.size() == 0 ? static_cast<double>(t_count) : weights.sum();
}

Matrix mu_posterior_precision(const numerics::SpdMatrix& A_mu, const Matrix& omega,
                              const Vector& weights, Index t_count) {
  return A_mu.matrix() + weight_total(weights, t_count) * omega;
}

Vector mu_posterior_linear(const numerics::SpdMatrix& A_mu, const Vector& b_mu,
                           const Matrix& omega, const Matrix& r_minus_skew,
                           const Vector& weights) {
  check_weights(weights, r_minus_skew.rows());
  const Vector w = weights.size() == 0 ? Vector::Ones(r_minus_skew.rows()) : weights;
  const Vector weighted_sum = r_minus_skew.transpose() * w;
  return A_mu.matrix() * b_mu + omega * weighted_sum;
}

DeltaStats delta_likelihood_stats(const Matrix& omega, const Matrix& Z,
                                  const Matrix& r_centered, const Vector& weights,
                                  const model::DeltaLayout& layout) {
  const Index n = layout.n();
  if (omega.rows() != n || Z.cols() != n || r_centered.cols() != n ||
      Z.rows() != r_centered.rows()) {
    throw DimensionMismatch("delta_likelihood_stats: dimension mismatch");
  }
  check_weights(weights, Z.rows());
  const Matrix zw = scale_rows(Z, weights);
  const Matrix g = Z.transpose() * zw;           // Σ γ_t Z_t Z_tᵀ
  const Matrix c = r_centered.transpose() * zw;  // Σ γ_t R̃_t Z_tᵀ
  const Matrix omega_c = omega * c;

  const Index J = layout.size();
  DeltaStats stats{Matrix(J, J), Vector(J)};
  const auto& entries = layout.entries();
  for (Index p = 0; p < J; ++p) {
    const auto [i, j] = entries[static_cast<std::size_t>(p)];
    stats.linear(p) = omega_c(i, j);
    for (Index q = 0; q < J; ++q) {
      const auto [k, l] = entries[static_cast<std::size_t>(q)];
      stats.precision(p, q) = omega(i, k) * g(j, l);
    }
  }
  return stats;
}

Matrix residual_cross_product(const Matrix& e, const Vector& weights) {
  check_weights(weights, e.rows());
  return e.transpose() * scale_rows(e, weights);
}

GammaConditional gamma_conditional(const model::ModelParams& params, const Vector& z_t,
                                   const Vector& r_t, double varphi) {
  const Vector e = r_t - params.mu - params.delta * z_t;
  const double n = static_cast<double>(z_t.size());
  return {0.5 * (varphi + 2.0 * n),
          0.5 * (varphi + z_t.squaredNorm() + e.dot(params.omega.matrix() * e))};
}

double update_gamma_t(const model::ModelParams& params, const model::LatentState& latent,
                      const model::Dataset& data, double varphi, Index t, RngStream& rng) {
  if (t < 0 || t >= data.T()) throw IndexOutOfRange("update_gamma_t: t out of range");
  const auto c = gamma_conditional(params, latent.Z.row(t).transpose(),
                                   data.R().row(t).transpose(), varphi);
  return distributions::draw_gamma(c.shape, c.rate, rng);
}

VarphiTarget VarphiTarget::from_gamma(const Vector& gamma, double a_varphi, double b_varphi) {
  const double t = static_cast<double>(gamma.size());
  const double excess = (gamma.array() - gamma.array().log()).sum();
  return {t, a_varphi, b_varphi + 0.5 * std::numbers::ln2 * t + 0.5 * excess};
}

double VarphiTarget::log_density(double x) const {
  return (0.5 * x * t_count + a_varphi - 1.0) * std::log(x) - t_count * std::lgamma(0.5 * x) -
         b_hat * x;
}

double VarphiTarget::gradient(double x) const {
  return 0.5 * t_count * std::log(x) + 0.5 * t_count + (a_varphi - 1.0) / x -
         0.5 * t_count * digamma(0.5 * x) - b_hat;
}

double VarphiTarget::hessian(double x) const {
  return 0.5 * t_count * (1.0 / x - 0.5 * trigamma(0.5 * x)) - (a_varphi - 1.0) / (x * x);
}

double varphi_mode_find(double t_count, double a_varphi, double b_hat) {
  if (!(b_hat > 0.0)) throw NonPositiveParameter("varphi_mode_find: b_hat must be positive");
  const VarphiTarget f{t_count, a_varphi, b_hat};
  constexpr int kMaxIter = 200;
  constexpr double kTol = 1e-10;

  double lo = 1.0;
  double hi = 1.0;
  int iter = 0;
  while (f.gradient(lo) <= 0.0) {
    lo *= 0.5;
    if (++iter > kMaxIter) throw NoConvergence("varphi_mode_find: no lower bracket");
  }
  while (f.gradient(hi) >= 0.0) {
    hi *= 2.0;
    if (++iter > kMaxIter) throw NoConvergence("varphi_mode_find: no upper bracket");
  }

  double x = 0.5 * (lo + hi);
  for (int k = 0; k < kMaxIter; ++k) {
    const double g = f.gradient(x);
    if (std::abs(g) < kTol) return x;
    if (g > 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return x;
    double next = x - g / f.hessian(x);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    x = next;
  }
  throw NoConvergence("varphi_mode_find: Newton did not converge in 200 iterations");
}

VarphiMove update_varphi_mh(double varphi, const Vector& gamma, double a_varphi,
                            double b_varphi, RngStream& rng) {
  const auto target = VarphiTarget::from_gamma(gamma, a_varphi, b_varphi);
  const double mode = varphi_mode_find(target.t_count, target.a_varphi, target.b_hat);
  const double var = -1.0 / target.hessian(mode);
  const double proposal =
      distributions::draw_trunc_normal(mode, var, kVarphiFloor, distributions::kInf, rng);
  // The truncation constants of the independence proposal cancel.
  auto log_q = [&](double x) { return -0.5 * (x - mode) * (x - mode) / var; };
  const double log_ratio = target.log_density(proposal) - target.log_density(varphi) +
                           log_q(varphi) - log_q(proposal);
  if (varphi < kVarphiFloor || std::log(rng.uniform()) < log_ratio) {
    return {proposal, true};
  }
  return {varphi, false};
}

}  // namespace skewgibbs::skewt
