#include "doctest.h"
#include "oracles.hpp"
#include "skewgibbs/gibbs.hpp"
#include "skewgibbs/skewt.hpp"

using namespace skewgibbs;
using namespace skewgibbs::skewt;
using model::Dataset;
using model::ModelParams;
using numerics::SpdMatrix;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  const Vector v = oracle::random_vector(rows * cols, seed);
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// Log of the φ full conditional written straight from its ingredients:
//   prior Ga(a, b) × Π_t Ga(γ_t; φ/2, φ/2).
double varphi_log_posterior(double varphi, const Vector& gamma, double a, double b) {
  double lp = (a - 1.0) * std::log(varphi) - b * varphi;
  const double h = 0.5 * varphi;
  for (Index t = 0; t < gamma.size(); ++t) {
    lp += h * std::log(h) - std::lgamma(h) + (h - 1.0) * std::log(gamma(t)) - h * gamma(t);
  }
  return lp;
}

std::vector<double> gamma_iid(int count, double shape, double rate, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::gamma_distribution<double> g(shape, 1.0 / rate);
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(g(eng));
  return out;
}

}  // namespace

TEST_CASE("digamma and trigamma") {
  CHECK(digamma(1.0) == doctest::Approx(-0.5772156649015329).epsilon(1e-14));
  CHECK(trigamma(1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-14));
  for (double x : {0.3, 2.0, 17.5}) {
    CHECK(digamma(x) ==
          doctest::Approx(oracle::central_difference([](double y) { return std::lgamma(y); }, x, 1e-5))
              .epsilon(1e-8));
  }
}

TEST_CASE("gamma_t conditional: N = 1, zero latent and residual") {
  const double varphi = 6.0;
  const ModelParams p{Vector::Zero(1), Matrix::Zero(1, 1), SpdMatrix::identity(1)};
  const auto c = gamma_conditional(p, Vector::Zero(1), Vector::Zero(1), varphi);
  CHECK(c.shape == doctest::Approx((varphi + 2.0) / 2.0));
  CHECK(c.rate == doctest::Approx(varphi / 2.0));

  const auto q = oracle::quadrature_moments(
      [&](double g) { return std::pow(g, 0.5 * (varphi + 2.0) - 1.0) * std::exp(-0.5 * varphi * g); },
      0.0, 20.0, 40000);
  const Dataset data(Matrix::Zero(1, 1));
  const model::LatentState latent{Matrix::Zero(1, 1), Vector::Ones(1)};
  RngStream rng(1, 0);
  std::vector<double> xs;
  for (int k = 0; k < 200000; ++k) xs.push_back(update_gamma_t(p, latent, data, varphi, 0, rng));
  CHECK(oracle::mean_of(xs) == doctest::Approx(q.mean).epsilon(0.01));
  CHECK(oracle::variance_of(xs) == doctest::Approx(q.second - q.mean * q.mean).epsilon(0.01 * 3));
}

TEST_CASE("gamma_t concentrates at one as varphi grows") {
  const ModelParams p{Vector::Zero(2), Matrix::Identity(2, 2), SpdMatrix::identity(2)};
  const Dataset data(random_matrix(1, 2, 2));
  const model::LatentState latent{random_matrix(1, 2, 3).cwiseAbs(), Vector::Ones(1)};
  RngStream rng(2, 0);
  double prev = 1e300;
  for (double varphi : {5.0, 50.0, 500.0, 5000.0}) {
    std::vector<double> xs;
    for (int k = 0; k < 20000; ++k) xs.push_back(update_gamma_t(p, latent, data, varphi, 0, rng));
    const double v = oracle::variance_of(xs);
    CHECK(v < prev);
    prev = v;
    if (varphi == 5000.0) CHECK(std::abs(oracle::mean_of(xs) - 1.0) < 0.01);
  }
}

TEST_CASE("gamma_t moments against quadrature of the joint density") {
  // p(γ | ·) ∝ Ga(γ; φ/2, φ/2) · Π_i γ^{1/2} e^{-γ z_i²/2} · γ^{N/2} e^{-γ eᵀΩe/2}
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Index n = 3;
    const double varphi = 3.0 + 2.0 * seed;
    Matrix delta = random_matrix(n, n, 10 + seed);
    delta = delta.triangularView<Eigen::Lower>();
    const Matrix om = oracle::random_spd(n, 20 + seed) / n;
    const ModelParams p{oracle::random_vector(n, 30 + seed), delta, SpdMatrix(om)};
    const Vector z = oracle::random_vector(n, 40 + seed).cwiseAbs();
    const Vector r = oracle::random_vector(n, 50 + seed) * 2.0;
    const Vector e = r - p.mu - delta * z;
    const double zz = z.squaredNorm(), q = e.dot(om * e);
    const auto density = [&](double g) {
      return std::exp((0.5 * varphi - 1.0) * std::log(g) - 0.5 * varphi * g + 0.5 * n * std::log(g) -
                      0.5 * g * zz + 0.5 * n * std::log(g) - 0.5 * g * q);
    };
    const auto conditional = gamma_conditional(p, z, r, varphi);
    const double upper = 40.0 * (conditional.shape + 5.0) / conditional.rate;
    const auto quad = oracle::quadrature_moments(density, 1e-12, upper, 200000);

    const Dataset data(r.transpose());
    const model::LatentState latent{z.transpose(), Vector::Ones(1)};
    RngStream rng(3, seed);
    std::vector<double> xs;
    for (int k = 0; k < 200000; ++k) xs.push_back(update_gamma_t(p, latent, data, varphi, 0, rng));
    CHECK(oracle::mean_of(xs) == doctest::Approx(quad.mean).epsilon(0.01));
    CHECK(oracle::variance_of(xs) == doctest::Approx(quad.second - quad.mean * quad.mean).epsilon(0.03));
  }
}

TEST_CASE("varphi target matches the direct posterior up to a constant") {
  const auto g = gamma_iid(300, 4.0, 4.0, 7);
  const Vector gamma = Eigen::Map<const Vector>(g.data(), static_cast<Index>(g.size()));
  const auto f = VarphiTarget::from_gamma(gamma, 2.0, 0.1);
  const double d1 = f.log_density(7.0) - f.log_density(3.0);
  const double d2 = varphi_log_posterior(7.0, gamma, 2.0, 0.1) - varphi_log_posterior(3.0, gamma, 2.0, 0.1);
  CHECK(std::abs(d1 - d2) < 1e-10 * std::max(1.0, std::abs(d2)));
  // b̂ = b + (log 2 / 2) T + ½ Σ (γ - log γ)
  const double b_hat = 0.1 + 0.5 * std::log(2.0) * 300 + 0.5 * (gamma.array() - gamma.array().log()).sum();
  CHECK(f.b_hat == doctest::Approx(b_hat).epsilon(1e-13));
}

TEST_CASE("varphi target: gradient, curvature and mode") {
  const auto g = gamma_iid(1000, 4.0, 4.0, 8);
  const Vector gamma = Eigen::Map<const Vector>(g.data(), static_cast<Index>(g.size()));
  const auto f = VarphiTarget::from_gamma(gamma, 2.0, 0.1);
  for (double x = 1.0; x <= 50.0; x += 0.5) {
    const double fd = oracle::central_difference([&](double y) { return f.log_density(y); }, x, 1e-4 * x);
    CHECK(std::abs(f.gradient(x) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    const double fd2 = oracle::central_difference([&](double y) { return f.gradient(y); }, x, 1e-4 * x);
    CHECK(std::abs(f.hessian(x) - fd2) <= 1e-6 * std::max(1.0, std::abs(fd2)));
    CHECK(f.hessian(x) < 0.0);
  }
  const double mode = varphi_mode_find(f.t_count, f.a_varphi, f.b_hat);
  CHECK(std::abs(f.gradient(mode)) < 1e-8);
  CHECK(f.log_density(mode) >= f.log_density(mode * 1.01));
  CHECK(f.log_density(mode) >= f.log_density(mode * 0.99));
}

TEST_CASE("varphi mode is found for extreme inputs") {
  for (double t : {1.0, 10.0, 1e4}) {
    for (double excess : {1e-3, 0.5, 50.0}) {
      // b̂ is at least (log 2/2) T + T/2 (γ - log γ ≥ 1)
      const double b_hat = 0.1 + 0.5 * (std::log(2.0) + 1.0) * t + excess * t;
      const double mode = varphi_mode_find(t, 2.0, b_hat);
      CHECK(mode > 0.0);
      CHECK(std::abs(VarphiTarget{t, 2.0, b_hat}.gradient(mode)) < 1e-6 * t);
    }
  }
  CHECK_THROWS_AS(varphi_mode_find(10.0, 2.0, -1.0), NonPositiveParameter);
}

TEST_CASE("varphi MH on iid Ga(4, 4) mixing scalars recovers varphi = 8") {
  const auto g = gamma_iid(1000, 4.0, 4.0, 9);
  const Vector gamma = Eigen::Map<const Vector>(g.data(), static_cast<Index>(g.size()));
  RngStream rng(4, 0);
  double varphi = 10.0, sum = 0.0;
  int accepted = 0;
  const int m = 20000;
  for (int k = 0; k < m; ++k) {
    const auto move = update_varphi_mh(varphi, gamma, 2.0, 0.1, rng);
    varphi = move.value;
    CHECK(varphi >= kVarphiFloor);
    accepted += move.accepted;
    sum += varphi;
  }
  const double rate = double(accepted) / m;
  CHECK(rate > 0.5);
  CHECK(rate < 1.0);
  CHECK(sum / m >= 5.0);
  CHECK(sum / m <= 12.0);
}

TEST_CASE("weighting hooks") {
  const Index n = 3, t = 25;
  const Matrix om = oracle::random_spd(n, 60);
  const SpdMatrix a_mu = SpdMatrix::scaled_identity(n, 0.01);
  const Matrix Z = random_matrix(t, n, 61).cwiseAbs();
  const Matrix rc = random_matrix(t, n, 62);
  const model::DeltaLayout lt(model::DeltaLayout::Shape::LowerTriangular, n);

  SUBCASE("unit weights are bitwise the unweighted path") {
    const Vector ones = Vector::Ones(t);
    CHECK(mu_posterior_precision(a_mu, om, ones, t) == mu_posterior_precision(a_mu, om, Vector(), t));
    CHECK(mu_posterior_linear(a_mu, Vector::Zero(n), om, rc, ones) ==
          mu_posterior_linear(a_mu, Vector::Zero(n), om, rc, Vector()));
    const auto a = delta_likelihood_stats(om, Z, rc, ones, lt);
    const auto b = delta_likelihood_stats(om, Z, rc, Vector(), lt);
    CHECK(a.precision == b.precision);
    CHECK(a.linear == b.linear);
    CHECK(residual_cross_product(rc, ones) == residual_cross_product(rc, Vector()));
  }
  SUBCASE("doubling every weight doubles the likelihood precision") {
    const Matrix base = mu_posterior_precision(a_mu, om, Vector(), t) - a_mu.matrix();
    const Matrix twice = mu_posterior_precision(a_mu, om, Vector::Constant(t, 2.0), t) - a_mu.matrix();
    CHECK((twice - 2.0 * base).norm() < 1e-12 * base.norm());
  }
  SUBCASE("delta statistics against an explicit sum over W_t") {
    const Vector w = oracle::random_vector(t, 63).cwiseAbs().array() + 0.2;
    for (auto shape : {model::DeltaLayout::Shape::LowerTriangular, model::DeltaLayout::Shape::Full}) {
      const model::DeltaLayout layout(shape, n);
      Matrix prec = Matrix::Zero(layout.size(), layout.size());
      Vector lin = Vector::Zero(layout.size());
      for (Index s = 0; s < t; ++s) {
        // W_t built from the layout's entry list: row i, column k holds z_j for entry (i, j).
        Matrix W = Matrix::Zero(n, layout.size());
        for (Index k = 0; k < layout.size(); ++k) {
          const auto [i, j] = layout.entries()[static_cast<std::size_t>(k)];
          W(i, k) = Z(s, j);
        }
        prec += w(s) * W.transpose() * om * W;
        lin += w(s) * W.transpose() * om * rc.row(s).transpose();
      }
      const auto stats = delta_likelihood_stats(om, Z, rc, w, layout);
      CHECK((stats.precision - prec).norm() < 1e-12 * prec.norm());
      CHECK((stats.linear - lin).norm() < 1e-12 * lin.norm());
    }
  }
  SUBCASE("weight length is checked") {
    CHECK_THROWS_AS(residual_cross_product(rc, Vector::Ones(t + 1)), DimensionMismatch);
  }
}

TEST_CASE("skew-t chain recovers varphi on synthetic data") {
  // N = 3, T = 1000, φ = 8, data from the scale-mixture representation.
  const Index n = 3, t = 1000;
  Matrix delta(3, 3);
  delta << 1.0, 0, 0, -0.5, 1.0, 0, 0.3, 0.2, -1.0;
  std::mt19937_64 eng(77);
  std::normal_distribution<double> nd;
  std::gamma_distribution<double> gd(4.0, 0.25);
  Matrix R(t, n);
  for (Index s = 0; s < t; ++s) {
    const double scale = 1.0 / std::sqrt(gd(eng));
    Vector z(n), e(n);
    for (Index i = 0; i < n; ++i) {
      z(i) = std::abs(nd(eng));
      e(i) = nd(eng);
    }
    R.row(s) = (scale * (delta * z + e)).transpose();
  }
  const auto prior = model::make_prior({}, n, model::Variant::LTNOWI, model::Tail::SkewT);
  RngStream rng(5, 0);
  const auto summary = gibbs::run_chain(Dataset(R), prior, {1000, 2000, 1}, rng);
  REQUIRE(summary.varphi_mean.has_value());
  CHECK(*summary.varphi_mean >= 5.0);
  CHECK(*summary.varphi_mean <= 12.0);
  CHECK(summary.varphi_acceptance > 0.3);
}
