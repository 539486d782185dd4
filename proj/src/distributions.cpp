#include "skewgibbs/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/special_functions/erf.hpp>

namespace skewgibbs {

namespace {

std::seed_seq make_seed_seq(std::uint64_t seed, std::uint64_t stream_id) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream_id),
                       static_cast<std::uint32_t>(stream_id >> 32)};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  auto seq = make_seed_seq(seed, stream_id);
  engine_.seed(seq);
}

double RngStream::uniform() {
  // 53 random bits centred in their bucket: never 0, never 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() { return normal_(engine_); }

double RngStream::exponential(double rate) { return -std::log(uniform()) / rate; }

namespace distributions {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kTailStart = 5.0;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw NonPositiveParameter(std::string(what) + " must be positive and finite, got " +
                               std::to_string(value));
  }
}

// Upper tail probability Q(x) = P(Z > x).
double upper_tail(double x) { return 0.5 * std::erfc(x / kSqrt2); }
double upper_tail_inverse(double q) { return kSqrt2 * boost::math::erfc_inv(2.0 * q); }

// a >= kTailStart: far right tail, where the CDF route loses precision.
double tail_rejection(double a, double b, RngStream& rng) {
  const double root = std::sqrt(a * a + 4.0);
  const double uniform_cutoff =
      2.0 / (a + root) * std::exp((a * a - a * root) / 4.0 + 0.5);
  if (b - a < uniform_cutoff) {
    for (;;) {
      const double x = a + (b - a) * rng.uniform();
      if (std::log(rng.uniform()) < -0.5 * (x * x - a * a)) return x;
    }
  }
  const double rate = 0.5 * (a + root);
  for (;;) {
    const double x = a + rng.exponential(rate);
    if (x > b) continue;
    const double d = x - rate;
    if (std::log(rng.uniform()) < -0.5 * d * d) return x;
  }
}

double standard_trunc_normal(double a, double b, RngStream& rng) {
  if (b <= 0.0) return -standard_trunc_normal(-b, -a, rng);
  for (;;) {
    double x;
    if (a >= kTailStart) {
      return tail_rejection(a, b, rng);
    } else if (a >= 0.0) {
      const double qa = upper_tail(a);
      const double qb = upper_tail(b);
      x = upper_tail_inverse(qa - rng.uniform() * (qa - qb));
    } else {
      // a < 0 < b: invert the lower CDF Φ(x) = Q(-x).
      const double pa = upper_tail(-a);
      const double pb = upper_tail(-b);
      const double p = pa + rng.uniform() * (pb - pa);
      if (!(p > 0.0 && p < 1.0)) continue;
      x = -upper_tail_inverse(p);
    }
    if (std::isfinite(x)) return std::clamp(x, a, b);
  }
}

}  // namespace

Vector draw_mvn_from_precision(const Vector& mean, const numerics::SpdMatrix& precision,
                               RngStream& rng) {
  if (mean.size() != precision.dim()) {
    throw DimensionMismatch("draw_mvn_from_precision: mean and precision sizes differ");
  }
  Vector z(mean.size());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  // Lᵀ x = z gives Cov(x) = (L Lᵀ)⁻¹.
  return mean + precision.lower().triangularView<Eigen::Lower>().transpose().solve(z);
}

Vector draw_mvn_canonical(const numerics::SpdMatrix& precision, const Vector& linear,
                          RngStream& rng) {
  return draw_mvn_from_precision(precision.solve(linear), precision, rng);
}

double draw_trunc_normal(double mu, double sigma2, double lo, double hi, RngStream& rng) {
  require_positive(sigma2, "draw_trunc_normal: sigma2");
  if (!(lo < hi)) {
    throw EmptyInterval("draw_trunc_normal: [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "] is empty");
  }
  const double sigma = std::sqrt(sigma2);
  const double a = (lo - mu) / sigma;
  const double b = (hi - mu) / sigma;
  if (!(a < b)) {
    // Interval narrower than the resolution of the standardized scale.
    return std::clamp(mu, lo, hi);
  }
  const double x = mu + sigma * standard_trunc_normal(a, b, rng);
  return std::clamp(x, lo, hi);
}

numerics::SpdMatrix draw_wishart(const numerics::SpdMatrix& scale, double dof, RngStream& rng) {
  const Index n = scale.dim();
  if (!(dof >= static_cast<double>(n)) || !std::isfinite(dof)) {
    throw DofTooSmall("draw_wishart: dof " + std::to_string(dof) + " < dimension " +
                      std::to_string(n));
  }
  Matrix bartlett = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    bartlett(i, i) = std::sqrt(draw_chi_square(dof - static_cast<double>(i), rng));
    for (Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Matrix factor = scale.lower() * bartlett;
  return numerics::SpdMatrix(factor * factor.transpose());
}

double draw_gamma(double shape, double rate, RngStream& rng) {
  require_positive(shape, "draw_gamma: shape");
  require_positive(rate, "draw_gamma: rate");
  std::gamma_distribution<double> gamma(shape, 1.0 / rate);
  double x = gamma(rng.engine());
  // Shapes well below 1 can underflow to exactly zero.
  return std::max(x, std::numeric_limits<double>::min());
}

double draw_inv_gamma(double shape, double scale, RngStream& rng) {
  return 1.0 / draw_gamma(shape, scale, rng);
}

double draw_chi_square(double dof, RngStream& rng) { return draw_gamma(0.5 * dof, 0.5, rng); }

}  // namespace distributions
}  // namespace skewgibbs
