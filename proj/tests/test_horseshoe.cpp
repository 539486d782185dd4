#include <algorithm>

#include "doctest.h"
#include "oracles.hpp"
#include "skewgibbs/gibbs.hpp"
#include "skewgibbs/horseshoe.hpp"

using namespace skewgibbs;
using namespace skewgibbs::horseshoe;
using numerics::SpdMatrix;

namespace {

// Largest gap between the empirical CDF of xs and `cdf`.
double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

// IG(shape 1, scale s): P(X <= x) = exp(-s / x).
double ig1_cdf(double s, double x) { return std::exp(-s / x); }

// λ with λ ~ C⁺(0, 1): P(λ² <= x) = (2/π) atan(√x).
double half_cauchy_sq_cdf(double x) { return 2.0 / M_PI * std::atan(std::sqrt(x)); }

}  // namespace

TEST_CASE("draw_prior produces valid states") {
  RngStream rng(1, 0);
  CHECK(DeltaShrinkState::draw_prior(6, rng).valid());
  const auto o = OmegaShrinkState::draw_prior(4, rng);
  CHECK(o.valid());
  CHECK(o.rho2_at(2, 1) == o.rho2_at(1, 2));
}

TEST_CASE("delta shrink: zero coefficient gives lambda2 ~ IG(1, 1/nu)") {
  DeltaShrinkState s;
  s.lambda2 = Vector::Ones(1);
  s.nu = Vector::Constant(1, 0.4);
  s.tau2 = 3.0;
  s.xi = 1.0;
  RngStream rng(2, 0);
  std::vector<double> xs;
  for (int k = 0; k < 50000; ++k) xs.push_back(update_delta_shrink(Vector::Zero(1), s, rng).lambda2(0));
  CHECK(ks_distance(xs, [](double x) { return ig1_cdf(1.0 / 0.4, x); }) < 0.01);
}

TEST_CASE("delta shrink: tau2 grows with the coefficients") {
  DeltaShrinkState s;
  s.lambda2 = Vector::Ones(4);
  s.nu = Vector::Ones(4);
  RngStream rng(3, 0);
  std::vector<double> medians;
  for (double scale : {0.1, 1.0, 10.0, 100.0}) {
    std::vector<double> xs;
    for (int k = 0; k < 20000; ++k) xs.push_back(update_delta_shrink(Vector::Constant(4, scale), s, rng).tau2);
    std::sort(xs.begin(), xs.end());
    medians.push_back(xs[10000]);
  }
  CHECK(std::is_sorted(medians.begin(), medians.end()));
  CHECK(medians.back() > 2.0 * medians.front());
}

TEST_CASE("delta shrink: tau2 conditional mean") {
  // λ²_j ~ IG(1, c_j), c_j = 1/ν_j + δ_j²/(2τ²), so E[1/λ²_j] = 1/c_j and
  // E[τ²] = (1/ξ + ½ Σ δ_j²/c_j) / ((J+1)/2 - 1).
  Vector delta(5);
  delta << 0.5, -1.0, 2.0, 0.1, 0.0;
  DeltaShrinkState s;
  s.lambda2 = Vector::Ones(5);
  s.nu = Vector::Constant(5, 0.7);
  s.tau2 = 1.3;
  s.xi = 0.9;
  double expect = 1.0 / s.xi;
  for (Index j = 0; j < 5; ++j) {
    const double c = 1.0 / s.nu(j) + delta(j) * delta(j) / (2.0 * s.tau2);
    expect += 0.5 * delta(j) * delta(j) / c;
  }
  expect /= 0.5 * 6 - 1.0;
  RngStream rng(4, 0);
  double sum = 0.0;
  const int m = 400000;
  for (int k = 0; k < m; ++k) sum += update_delta_shrink(delta, s, rng).tau2;
  CHECK(sum / m == doctest::Approx(expect).epsilon(0.02));
}

TEST_CASE("delta shrink: alternating with delta from its prior reproduces the half-Cauchy prior") {
  // Successive-conditional check: δ ~ N(0, λ²τ²) then the shrinkage update.
  // The joint prior is stationary, so λ² and τ² keep their C⁺(0,1)² marginals.
  RngStream rng(5, 0);
  auto s = DeltaShrinkState::draw_prior(3, rng);
  std::vector<double> lam, tau;
  Vector delta(3);
  for (int k = 0; k < 400000; ++k) {
    for (Index j = 0; j < 3; ++j) delta(j) = std::sqrt(s.lambda2(j) * s.tau2) * rng.normal();
    s = update_delta_shrink(delta, s, rng);
    if (k % 20 == 0) {
      lam.push_back(s.lambda2(0));
      tau.push_back(s.tau2);
    }
  }
  CHECK(ks_distance(lam, half_cauchy_sq_cdf) < 0.03);
  CHECK(ks_distance(tau, half_cauchy_sq_cdf) < 0.03);
}

TEST_CASE("horseshoe prior precision") {
  DeltaShrinkState s;
  s.tau2 = 1.0;
  s.lambda2 = Vector::Ones(3);
  s.nu = Vector::Ones(3);
  auto p = build_horseshoe_prior_precision(s);
  CHECK(p.precision.isIdentity());
  CHECK(p.mean.isZero());
  s.tau2 = 4.0;
  s.lambda2(0) = 0.25;
  p = build_horseshoe_prior_precision(s);
  CHECK(p.precision(0, 0) == doctest::Approx(1.0));
  CHECK(p.precision(1, 1) == doctest::Approx(0.25));
}

TEST_CASE("horseshoe precision injected into the delta update, by hand") {
  // τ² = 4, λ² = (0.25, 1, 0.5) → A = diag(1, 0.25, 0.5). One observation
  // z = (1, 2), r = (1, -1), Ω = I: W = [[1,0,0],[0,1,2]],
  // Â = A + WᵀW = [[2,0,0],[0,1.25,2],[0,2,4.5]], b̂ = (1,-1,-2).
  DeltaShrinkState s;
  s.tau2 = 4.0;
  s.lambda2 = Vector(3);
  s.lambda2 << 0.25, 1.0, 0.5;
  s.nu = Vector::Ones(3);
  Matrix a_hat(3, 3);
  a_hat << 2, 0, 0, 0, 1.25, 2, 0, 2, 4.5;
  Vector b_hat(3);
  b_hat << 1, -1, -2;
  Matrix Z(1, 2), R(1, 2);
  Z << 1, 2;
  R << 1, -1;
  const auto prior = model::make_prior({}, 2, model::Variant::LTHSGHS);
  const model::ModelParams p{Vector::Zero(2), Matrix::Zero(2, 2), SpdMatrix::identity(2)};
  RngStream rng(6, 0);
  std::vector<Vector> xs;
  for (int k = 0; k < 100000; ++k) {
    xs.push_back(gibbs::update_delta_lt(p, {Z, Vector()}, model::Dataset(R), prior, rng,
                                        build_horseshoe_prior_precision(s)));
  }
  const auto mom = oracle::moments(xs);
  CHECK(oracle::max_abs(mom.mean - a_hat.ldlt().solve(b_hat)) < 0.02);
  CHECK(oracle::max_abs(mom.cov - a_hat.inverse()) < 0.05);
}

TEST_CASE("update_eta") {
  RngStream rng(7, 0);
  SUBCASE("a = 1, b = 0, T = 1500: Ga(751, s11/2)") {
    const double s11 = 1400.0;
    std::vector<double> xs;
    for (int k = 0; k < 100000; ++k) xs.push_back(update_eta(s11, 1500, 1.0, 0.0, rng));
    CHECK(oracle::mean_of(xs) == doctest::Approx(751.0 / 700.0).epsilon(0.01));
    CHECK(oracle::variance_of(xs) == doctest::Approx(751.0 / (700.0 * 700.0)).epsilon(0.03));
  }
  SUBCASE("no data: the prior") {
    double s = 0.0;
    for (int k = 0; k < 100000; ++k) s += update_eta(0.0, 0.0, 3.0, 2.0, rng);
    CHECK(s / 100000 == doctest::Approx(1.5).epsilon(0.01));
  }
  SUBCASE("bad input") { CHECK_THROWS_AS(update_eta(-1.0, 10, 1, 0, rng), NonPositiveParameter); }
}

TEST_CASE("line restriction from the origin is symmetric and nonempty") {
  const Matrix p = oracle::random_spd(3, 9).inverse();
  const Matrix a_hat = oracle::random_spd(3, 10);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Vector alpha = oracle::random_vector(3, seed);
    alpha.normalize();
    const auto line = line_restriction(Vector::Zero(3), 2.0, p, Vector::Ones(3), a_hat, alpha);
    CHECK(line.lo < 0.0);
    CHECK(line.hi > 0.0);
    CHECK(line.lo == doctest::Approx(-line.hi));
    // endpoints sit on the ellipsoid boundary
    CHECK((line.hi * alpha).dot(p * (line.hi * alpha)) == doctest::Approx(2.0));
  }
}

TEST_CASE("hit-and-run never leaves the ellipsoid (fuzzed, N = 4)") {
  const Matrix p = oracle::random_spd(3, 11).inverse();
  const SpdMatrix pinv(p);
  const double omega11 = 0.8;
  RngStream rng(8, 0);
  Vector w = Vector::Zero(3);
  int bad = 0;
  for (int k = 0; k < 1000000; ++k) {
    // re-randomize the target every so often so the moves cover many shapes
    const Vector s21 = (k % 1000 == 0 ? 50.0 : 1.0) * Vector::Constant(3, (k % 7) - 3.0);
    w = hit_and_run_omega21(w, omega11, pinv, s21, 5.0, Vector::Constant(3, 0.1), rng);
    if (!(w.dot(p * w) < omega11)) ++bad;
  }
  CHECK(bad == 0);
}

TEST_CASE("hit-and-run rejects an infeasible start") {
  RngStream rng(9, 0);
  CHECK_THROWS_AS(hit_and_run_omega21(Vector::Constant(2, 2.0), 1.0, SpdMatrix::identity(2),
                                      Vector::Zero(2), 1.0, Vector::Ones(2), rng),
                  InfeasibleStart);
}

TEST_CASE("hit-and-run chain matches rejection sampling") {
  Matrix p(3, 3);
  p << 1.0, 0.2, 0.0, 0.2, 1.5, -0.3, 0.0, -0.3, 0.8;
  const double omega11 = 1.0, s11 = 2.0;
  Vector s21(3);
  s21 << 0.9, -0.6, 0.4;
  const Vector a_diag = (Vector(3) << 1.0, 2.0, 3.0).finished();
  Matrix a_hat = s11 * p;
  a_hat.diagonal() += a_diag;
  const Vector mean = -a_hat.ldlt().solve(s21);
  const auto ref = oracle::rejection_sample(
      mean, a_hat.inverse(), [&](const Vector& x) { return x.dot(p * x) < omega11; }, 100000, 3);
  const auto expect = oracle::moments(ref);

  RngStream rng(10, 0);
  Vector w = Vector::Zero(3);
  std::vector<Vector> xs;
  const SpdMatrix pinv(p);
  for (int k = 0; k < 1000; ++k) w = hit_and_run_omega21(w, omega11, pinv, s21, s11, a_diag, rng);
  for (int k = 0; k < 200000; ++k) {
    w = hit_and_run_omega21(w, omega11, pinv, s21, s11, a_diag, rng);
    xs.push_back(w);
  }
  const auto got = oracle::moments(xs);
  CHECK(oracle::max_abs(got.mean - expect.mean) < 0.02);
  CHECK(oracle::max_abs(got.cov - expect.cov) < 0.05);
}

TEST_CASE("ghs sweep with N = 1 is the eta draw") {
  OmegaShrinkState s;
  s.rho2 = Matrix::Ones(1, 1);
  s.upsilon = Matrix::Ones(1, 1);
  RngStream rng(11, 0);
  double sum = 0.0;
  const int m = 100000;
  for (int k = 0; k < m; ++k) {
    Matrix om = Matrix::Identity(1, 1);
    ghs_block_sweep(om, Matrix::Constant(1, 1, 30.0), s, 20.0, 1.0, 0.0, rng);
    sum += om(0, 0);
  }
  CHECK(sum / m == doctest::Approx(11.0 / 15.0).epsilon(0.01));
}

TEST_CASE("ghs sweep keeps Omega positive definite at every pivot") {
  const Index n = 5;
  RngStream rng(12, 0);
  auto shrink = OmegaShrinkState::draw_prior(n, rng);
  Matrix om = Matrix::Identity(n, n);
  int violations = 0;
  for (int k = 0; k < 3000; ++k) {
    // badly scaled cross-products stress the interval arithmetic
    const Matrix s = oracle::random_spd(n, 1000 + k) * std::pow(10.0, (k % 9) - 4);
    ghs_block_sweep(om, s, shrink, 50.0, 1.0, 0.0, rng);
    if (!(numerics::min_eigenvalue(om) > 0.0)) ++violations;
    shrink = update_omega_shrink(om, shrink, rng);
  }
  CHECK(violations == 0);
}

TEST_CASE("ghs posterior mean off-diagonals near zero on identity-precision data") {
  const Index n = 5, t = 1000;
  std::mt19937_64 eng(2024);
  std::normal_distribution<double> nd;
  Matrix e(t, n);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < n; ++j) e(i, j) = nd(eng);
  }
  const Matrix s = e.transpose() * e;
  RngStream rng(13, 0);
  auto shrink = OmegaShrinkState::draw_prior(n, rng);
  Matrix om = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(n, n);
  const int burn = 1000, m = 5000;
  for (int k = 0; k < burn + m; ++k) {
    ghs_block_sweep(om, s, shrink, t, 1.0, 0.0, rng);
    shrink = update_omega_shrink(om, shrink, rng);
    if (k >= burn) sum += om;
  }
  Matrix mean = sum / m;
  mean.diagonal().setZero();
  CHECK(oracle::max_abs(mean) < 0.05);
  // and tighter than the unshrunk sample precision
  Matrix mle = (s / t).inverse();
  mle.diagonal().setZero();
  CHECK(oracle::max_abs(mean) < oracle::max_abs(mle));
}

TEST_CASE("omega shrink conditionals") {
  RngStream rng(14, 0);
  SUBCASE("zero entry gives rho2 ~ IG(1, 1/upsilon); N = 2 zero gives psi2 ~ IG(1, 1/zeta)") {
    OmegaShrinkState s;
    s.rho2 = Matrix::Ones(2, 2);
    s.upsilon = Matrix::Constant(2, 2, 0.5);
    s.psi2 = 2.0;
    s.zeta = 0.25;
    std::vector<double> r, p;
    for (int k = 0; k < 50000; ++k) {
      const auto next = update_omega_shrink(Matrix::Identity(2, 2), s, rng);
      r.push_back(next.rho2(0, 1));
      p.push_back(next.psi2);
    }
    CHECK(ks_distance(r, [](double x) { return ig1_cdf(2.0, x); }) < 0.01);
    // ψ² shape N(N-1)/4 + 1/2 = 1 at N = 2
    CHECK(ks_distance(p, [](double x) { return ig1_cdf(4.0, x); }) < 0.01);
  }
  SUBCASE("psi2 conditional mean at N = 4") {
    const Matrix om = oracle::random_spd(4, 15) / 4.0;
    OmegaShrinkState s;
    s.rho2 = Matrix::Ones(4, 4);
    s.upsilon = Matrix::Constant(4, 4, 0.8);
    s.psi2 = 0.6;
    s.zeta = 1.5;
    double expect = 1.0 / s.zeta;
    for (Index j = 1; j < 4; ++j) {
      for (Index i = 0; i < j; ++i) {
        const double w = om(i, j);
        expect += 0.5 * w * w / (1.0 / s.upsilon(i, j) + w * w / (2.0 * s.psi2));
      }
    }
    expect /= (6.0 / 2.0 + 0.5) - 1.0;
    double sum = 0.0;
    const int m = 400000;
    for (int k = 0; k < m; ++k) sum += update_omega_shrink(om, s, rng).psi2;
    CHECK(sum / m == doctest::Approx(expect).epsilon(0.02));
  }
}
