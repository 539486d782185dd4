#include "skewgibbs/horseshoe.hpp"

#include <cmath>

namespace skewgibbs::horseshoe {

using distributions::draw_inv_gamma;

DeltaShrinkState DeltaShrinkState::draw_prior(Index size, RngStream& rng) {
  DeltaShrinkState s;
  s.nu.resize(size);
  s.lambda2.resize(size);
  for (Index j = 0; j < size; ++j) {
    s.nu(j) = draw_inv_gamma(0.5, 1.0, rng);
    s.lambda2(j) = draw_inv_gamma(0.5, 1.0 / s.nu(j), rng);
  }
  s.xi = draw_inv_gamma(0.5, 1.0, rng);
  s.tau2 = draw_inv_gamma(0.5, 1.0 / s.xi, rng);
  return s;
}

bool DeltaShrinkState::valid() const {
  return lambda2.size() == nu.size() && (lambda2.array() > 0.0).all() &&
         (nu.array() > 0.0).all() && tau2 > 0.0 && xi > 0.0;
}

OmegaShrinkState OmegaShrinkState::draw_prior(Index n, RngStream& rng) {
  OmegaShrinkState s;
  s.rho2 = Matrix::Ones(n, n);
  s.upsilon = Matrix::Ones(n, n);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      s.upsilon(i, j) = s.upsilon(j, i) = draw_inv_gamma(0.5, 1.0, rng);
      s.rho2(i, j) = s.rho2(j, i) = draw_inv_gamma(0.5, 1.0 / s.upsilon(i, j), rng);
    }
  }
  s.zeta = draw_inv_gamma(0.5, 1.0, rng);
  s.psi2 = draw_inv_gamma(0.5, 1.0 / s.zeta, rng);
  return s;
}

bool OmegaShrinkState::valid() const {
  const Index n = rho2.rows();
  if (rho2.cols() != n || upsilon.rows() != n || upsilon.cols() != n) return false;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (!(rho2(i, j) > 0.0) || !(upsilon(i, j) > 0.0)) return false;
    }
  }
  return psi2 > 0.0 && zeta > 0.0;
}

DeltaShrinkState update_delta_shrink(const Vector& delta, const DeltaShrinkState& state,
                                     RngStream& rng) {
  const Index J = delta.size();
  if (state.lambda2.size() != J || state.nu.size() != J) {
    throw DimensionMismatch("update_delta_shrink: state size differs from delta");
  }
  DeltaShrinkState next = state;
  for (Index j = 0; j < J; ++j) {
    next.lambda2(j) = draw_inv_gamma(
        1.0, 1.0 / next.nu(j) + delta(j) * delta(j) / (2.0 * next.tau2), rng);
  }
  const double ssq = (delta.array().square() / next.lambda2.array()).sum();
  next.tau2 = draw_inv_gamma(0.5 * (static_cast<double>(J) + 1.0), 1.0 / next.xi + 0.5 * ssq, rng);
  for (Index j = 0; j < J; ++j) {
    next.nu(j) = draw_inv_gamma(1.0, 1.0 + 1.0 / next.lambda2(j), rng);
  }
  next.xi = draw_inv_gamma(1.0, 1.0 + 1.0 / next.tau2, rng);
  return next;
}

model::GaussianPrior build_horseshoe_prior_precision(const DeltaShrinkState& state) {
  const Index J = state.lambda2.size();
  model::GaussianPrior prior;
  prior.precision = Matrix::Zero(J, J);
  for (Index j = 0; j < J; ++j) prior.precision(j, j) = 1.0 / (state.tau2 * state.lambda2(j));
  prior.mean = Vector::Zero(J);
  return prior;
}

double update_eta(double s11, double t_count, double a_eta, double b_eta, RngStream& rng) {
  if (!(s11 >= 0.0)) throw NonPositiveParameter("update_eta: s11 must be nonnegative");
  return distributions::draw_gamma(a_eta + 0.5 * t_count, b_eta + 0.5 * s11, rng);
}

HitAndRunLine line_restriction(const Vector& omega21, double omega11, const Matrix& omega22_inv,
                               const Vector& s21, const Matrix& a_hat, const Vector& alpha) {
  const Vector p_alpha = omega22_inv * alpha;
  const double a = alpha.dot(p_alpha);
  const double b = omega21.dot(p_alpha);
  const double c = omega21.dot(omega22_inv * omega21) - omega11;
  const double disc = std::max(b * b - a * c, 0.0);
  // Roots of a κ² + 2 b κ + c; the product c/a < 0 puts them on either side of 0.
  const double q = -(b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : -r1;
  if (r1 > r2) std::swap(r1, r2);

  const Vector a_alpha = a_hat * alpha;
  const double precision = alpha.dot(a_alpha);
  return {-(s21.dot(alpha) + omega21.dot(a_alpha)) / precision, 1.0 / precision, r1, r2};
}

Vector hit_and_run_omega21(const Vector& omega21, double omega11,
                           const numerics::SpdMatrix& omega22_inv, const Vector& s21, double s11,
                           const Vector& a_omega_diag, RngStream& rng) {
  const Index m = omega21.size();
  if (omega22_inv.dim() != m || s21.size() != m || a_omega_diag.size() != m) {
    throw DimensionMismatch("hit_and_run_omega21: block sizes disagree");
  }
  const Matrix& p = omega22_inv.matrix();
  if (!(omega21.dot(p * omega21) < omega11)) {
    throw InfeasibleStart("hit_and_run_omega21: current point violates w21' W22^-1 w21 < w11");
  }
  Matrix a_hat = s11 * p;
  a_hat.diagonal() += a_omega_diag;

  Vector alpha(m);
  for (Index i = 0; i < m; ++i) alpha(i) = rng.normal();
  alpha /= alpha.norm();

  const auto line = line_restriction(omega21, omega11, p, s21, a_hat, alpha);
  // The open interval can round onto its boundary; redraw in that case.
  for (int attempt = 0; attempt < 16; ++attempt) {
    const double kappa =
        distributions::draw_trunc_normal(line.mean, line.variance, line.lo, line.hi, rng);
    Vector next = omega21 + kappa * alpha;
    if (next.dot(p * next) < omega11) return next;
  }
  return omega21;
}

void ghs_block_sweep(Matrix& omega, const Matrix& s, const OmegaShrinkState& shrink,
                     double t_count, double a_eta, double b_eta, RngStream& rng) {
  const Index n = omega.rows();
  if (shrink.rho2.rows() != n) throw DimensionMismatch("ghs_block_sweep: shrink state size");
  for (Index j = 0; j < n; ++j) {
    const auto part = numerics::partition_at(omega, s, j);
    const double eta = update_eta(part.s_scalar, t_count, a_eta, b_eta, rng);
    if (n == 1) {
      omega(0, 0) = eta;
      continue;
    }
    const numerics::SpdMatrix rest(part.rest);
    const numerics::SpdMatrix rest_inv(rest.inverse());
    const double quad = part.off_col.dot(rest_inv.matrix() * part.off_col);
    const double omega11 = eta + quad;

    const auto order = numerics::partition_order(n, j);
    Vector a_diag(n - 1);
    for (Index a = 0; a < n - 1; ++a) {
      a_diag(a) = 1.0 / (shrink.psi2 * shrink.rho2_at(order[static_cast<std::size_t>(a)], j));
    }
    const Vector col = hit_and_run_omega21(part.off_col, omega11, rest_inv, part.s_col,
                                           part.s_scalar, a_diag, rng);
    numerics::write_pivot(j, omega11, col, omega);
  }
}

OmegaShrinkState update_omega_shrink(const Matrix& omega, const OmegaShrinkState& state,
                                     RngStream& rng) {
  const Index n = omega.rows();
  if (state.rho2.rows() != n || state.upsilon.rows() != n) {
    throw DimensionMismatch("update_omega_shrink: state size differs from Omega");
  }
  OmegaShrinkState next = state;
  double ssq = 0.0;
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double w = omega(i, j);
      const double r = draw_inv_gamma(1.0, 1.0 / next.upsilon(i, j) + w * w / (2.0 * next.psi2), rng);
      next.rho2(i, j) = next.rho2(j, i) = r;
      ssq += w * w / r;
    }
  }
  const double pairs = 0.5 * static_cast<double>(n * (n - 1));
  next.psi2 = draw_inv_gamma(0.5 * pairs + 0.5, 1.0 / next.zeta + 0.5 * ssq, rng);
  for (Index j = 1; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      const double u = draw_inv_gamma(1.0, 1.0 + 1.0 / next.rho2(i, j), rng);
      next.upsilon(i, j) = next.upsilon(j, i) = u;
    }
  }
  next.zeta = draw_inv_gamma(1.0, 1.0 + 1.0 / next.psi2, rng);
  return next;
}

}  // namespace skewgibbs::horseshoe
