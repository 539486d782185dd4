#include "skewgibbs/gibbs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace skewgibbs::gibbs {

using model::Variant;
using numerics::SpdMatrix;

void ChainConfig::validate() const {
  if (burn_in < 0) throw NonPositiveParameter("chain: burn_in must be >= 0");
  if (draws < 1) throw NonPositiveParameter("chain: draws must be >= 1");
  if (thin < 1) throw NonPositiveParameter("chain: thin must be >= 1");
  if (draws < thin) throw NonPositiveParameter("chain: draws must be >= thin");
}

ChainState initial_state(const model::Dataset& data, const model::PriorConfig& prior,
                         RngStream& rng) {
  const Index n = data.N();
  if (prior.n() != n) throw DimensionMismatch("initial_state: prior and data N differ");
  ChainState s;
  s.params.mu = Vector::Zero(n);
  s.params.delta = Matrix::Zero(n, n);
  s.params.omega = SpdMatrix::identity(n);
  s.latent.Z.resize(data.T(), n);
  for (Index t = 0; t < data.T(); ++t) {
    for (Index i = 0; i < n; ++i) s.latent.Z(t, i) = std::abs(rng.normal());
  }
  if (prior.tail == model::Tail::SkewT) s.latent.gamma = Vector::Ones(data.T());
  if (prior.variant == Variant::LTHSGHS) {
    s.delta_shrink = horseshoe::DeltaShrinkState::draw_prior(prior.layout().size(), rng);
    s.omega_shrink = horseshoe::OmegaShrinkState::draw_prior(n, rng);
  }
  return s;
}

LatentConditional LatentConditional::from(const model::ModelParams& params) {
  const Index n = params.delta.rows();
  const Matrix dt_omega = params.delta.transpose() * params.omega.matrix();
  LatentConditional c;
  c.precision = Matrix::Identity(n, n) + dt_omega * params.delta;
  c.mean_map = SpdMatrix(c.precision).solve(dt_omega);
  return c;
}

void update_z_elementwise(const LatentConditional& cond, const Vector& mean, double gamma_t,
                          Eigen::Ref<Vector> z_t, RngStream& rng) {
  const Index n = z_t.size();
  const Matrix& a = cond.precision;
  for (Index i = 0; i < n; ++i) {
    double shift = 0.0;
    for (Index k = 0; k < n; ++k) {
      if (k != i) shift += a(i, k) * (z_t(k) - mean(k));
    }
    const double aii = a(i, i);
    z_t(i) = distributions::draw_trunc_normal(mean(i) - shift / aii, 1.0 / (gamma_t * aii), 0.0,
                                              distributions::kInf, rng);
  }
}

void update_z_elementwise(const model::ModelParams& params, const model::Dataset& data, Index t,
                          Eigen::Ref<Vector> z_t, RngStream& rng) {
  if (t < 0 || t >= data.T()) throw IndexOutOfRange("update_z_elementwise: t out of range");
  const auto cond = LatentConditional::from(params);
  const Vector centered = data.R().row(t).transpose() - params.mu;
  update_z_elementwise(cond, cond.mean(centered), 1.0, z_t, rng);
}

Vector update_mu(const model::ModelParams& params, const model::LatentState& latent,
                 const model::Dataset& data, const model::PriorConfig& prior, RngStream& rng) {
  const Matrix& omega = params.omega.matrix();
  const Matrix r_minus_skew = data.R() - latent.Z * params.delta.transpose();
  const SpdMatrix precision(
      skewt::mu_posterior_precision(prior.A_mu, omega, latent.gamma, data.T()));
  const Vector linear =
      skewt::mu_posterior_linear(prior.A_mu, prior.b_mu, omega, r_minus_skew, latent.gamma);
  return distributions::draw_mvn_canonical(precision, linear, rng);
}

Vector update_delta_vec(const model::ModelParams& params, const model::LatentState& latent,
                        const model::Dataset& data, const model::DeltaLayout& layout,
                        const model::GaussianPrior& delta_prior, RngStream& rng) {
  const Index J = layout.size();
  if (delta_prior.precision.rows() != J || delta_prior.mean.size() != J) {
    throw DimensionMismatch("update_delta: prior dimension " +
                            std::to_string(delta_prior.mean.size()) + " != layout size " +
                            std::to_string(J));
  }
  Matrix centered = data.R();
  centered.rowwise() -= params.mu.transpose();
  const auto stats = skewt::delta_likelihood_stats(params.omega.matrix(), latent.Z, centered,
                                                   latent.gamma, layout);
  const SpdMatrix precision(delta_prior.precision + stats.precision);
  const Vector linear = delta_prior.precision * delta_prior.mean + stats.linear;
  return distributions::draw_mvn_canonical(precision, linear, rng);
}

Matrix update_delta_full(const model::ModelParams& params, const model::LatentState& latent,
                         const model::Dataset& data, const model::PriorConfig& prior,
                         RngStream& rng) {
  const model::DeltaLayout layout(model::DeltaLayout::Shape::Full, data.N());
  const model::GaussianPrior p{prior.A_delta.matrix(), prior.b_delta};
  return layout.to_matrix(update_delta_vec(params, latent, data, layout, p, rng));
}

Vector update_delta_lt(const model::ModelParams& params, const model::LatentState& latent,
                       const model::Dataset& data, const model::PriorConfig& prior,
                       RngStream& rng, const std::optional<model::GaussianPrior>& override_prior) {
  const model::DeltaLayout layout(model::DeltaLayout::Shape::LowerTriangular, data.N());
  if (override_prior) return update_delta_vec(params, latent, data, layout, *override_prior, rng);
  const model::GaussianPrior p{prior.A_delta.matrix(), prior.b_delta};
  return update_delta_vec(params, latent, data, layout, p, rng);
}

SpdMatrix update_omega_wishart(const model::ModelParams& params,
                               const model::LatentState& latent, const model::Dataset& data,
                               const model::PriorConfig& prior, RngStream& rng) {
  const Matrix e = model::residuals(params, latent.Z, data);
  const SpdMatrix s_hat(prior.S_Omega.matrix() + skewt::residual_cross_product(e, latent.gamma));
  const SpdMatrix scale(s_hat.inverse());
  return distributions::draw_wishart(scale, prior.nu_Omega + static_cast<double>(data.T()), rng);
}

namespace {

void sweep_latent(ChainState& state, const model::Dataset& data, RngStream& rng) {
  const auto cond = LatentConditional::from(state.params);
  Matrix centered = data.R();
  centered.rowwise() -= state.params.mu.transpose();
  const Matrix means = centered * cond.mean_map.transpose();
  Vector z(data.N());
  for (Index t = 0; t < data.T(); ++t) {
    z = state.latent.Z.row(t).transpose();
    const double g = skewt::latent_precision_scale(state.latent.gamma, t);
    update_z_elementwise(cond, means.row(t).transpose(), g, z, rng);
    state.latent.Z.row(t) = z.transpose();
  }
}

void sweep_delta(ChainState& state, const model::Dataset& data, const model::PriorConfig& prior,
                 RngStream& rng) {
  switch (prior.variant) {
    case Variant::FullNOWI:
      state.params.delta = update_delta_full(state.params, state.latent, data, prior, rng);
      break;
    case Variant::LTNOWI: {
      const auto layout = prior.layout();
      state.params.delta =
          layout.to_matrix(update_delta_lt(state.params, state.latent, data, prior, rng));
      break;
    }
    case Variant::LTHSGHS: {
      const auto layout = prior.layout();
      const auto hs = horseshoe::build_horseshoe_prior_precision(state.delta_shrink);
      state.params.delta =
          layout.to_matrix(update_delta_lt(state.params, state.latent, data, prior, rng, hs));
      break;
    }
  }
}

void sweep_omega(ChainState& state, const model::Dataset& data, const model::PriorConfig& prior,
                 RngStream& rng) {
  if (prior.variant != Variant::LTHSGHS) {
    state.params.omega = update_omega_wishart(state.params, state.latent, data, prior, rng);
    return;
  }
  const Matrix e = model::residuals(state.params, state.latent.Z, data);
  const Matrix s = skewt::residual_cross_product(e, state.latent.gamma);
  Matrix omega = state.params.omega.matrix();
  horseshoe::ghs_block_sweep(omega, s, state.omega_shrink, static_cast<double>(data.T()),
                             prior.a_eta, prior.b_eta, rng);
  // With b_eta = 0 the diagonal prior is flat, and a row whose residual the
  // latent column can absorb exactly lets its precision drift to infinity.
  const double spread = omega.diagonal().maxCoeff() / omega.diagonal().minCoeff();
  if (!(spread < kMaxPrecisionSpread)) {
    throw NoConvergence("diagonal precision diverging (max/min diagonal of Omega " +
                        std::to_string(spread) + "); prior.b_eta > 0 gives a proper prior");
  }
  state.params.omega = SpdMatrix(omega);
}

}  // namespace

void gibbs_sweep(ChainState& state, const model::Dataset& data, const model::PriorConfig& prior,
                 RngStream& rng, const SweepPlan& plan) {
  const bool skew_t = prior.tail == model::Tail::SkewT;
  if (plan.latent) sweep_latent(state, data, rng);
  if (plan.mu) state.params.mu = update_mu(state.params, state.latent, data, prior, rng);
  if (plan.delta) sweep_delta(state, data, prior, rng);
  if (plan.omega) sweep_omega(state, data, prior, rng);
  if (plan.shrinkage && prior.variant == Variant::LTHSGHS) {
    state.delta_shrink = horseshoe::update_delta_shrink(prior.layout().to_vec(state.params.delta),
                                                        state.delta_shrink, rng);
    state.omega_shrink =
        horseshoe::update_omega_shrink(state.params.omega.matrix(), state.omega_shrink, rng);
  }
  if (skew_t && plan.gamma) {
    for (Index t = 0; t < data.T(); ++t) {
      state.latent.gamma(t) =
          skewt::update_gamma_t(state.params, state.latent, data, state.varphi, t, rng);
    }
  }
  if (skew_t && plan.varphi) {
    const auto move = skewt::update_varphi_mh(state.varphi, state.latent.gamma, prior.a_varphi,
                                              prior.b_varphi, rng);
    state.varphi = move.value;
    ++state.varphi_proposed;
    if (move.accepted) ++state.varphi_accepted;
  }
}

Vector flatten_draw(const Vector& mu, const Matrix& delta, const Matrix& omega,
                    const model::DeltaLayout& layout, std::optional<double> varphi) {
  const Index n = mu.size();
  Vector out(n + layout.size() + n * n + (varphi ? 1 : 0));
  Index k = 0;
  for (Index i = 0; i < n; ++i) out(k++) = mu(i);
  for (const auto& [i, j] : layout.entries()) out(k++) = delta(i, j);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(k++) = omega(i, j);
  }
  if (varphi) out(k++) = *varphi;
  return out;
}

namespace {

// Linear interpolation between order statistics (R type 7).
double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.size() == 1) return sorted.front();
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

ChainSummary summarize_draws(DrawBuffer draws, model::Variant variant, model::Tail tail) {
  const std::size_t count = draws.size();
  if (count == 0) throw DimensionMismatch("summarize_draws: no draws");
  const Index n = draws.mu.front().size();
  const auto layout = model::DeltaLayout::for_variant(variant, n);
  const bool has_varphi = tail == model::Tail::SkewT && draws.varphi.size() == count;

  ChainSummary s;
  s.variant = variant;
  s.tail = tail;
  s.stored_draws = static_cast<Index>(count);
  s.mu_mean = Vector::Zero(n);
  s.delta_mean = Matrix::Zero(n, n);
  s.omega_mean = Matrix::Zero(n, n);
  double varphi_sum = 0.0;
  for (std::size_t d = 0; d < count; ++d) {
    s.mu_mean += draws.mu[d];
    s.delta_mean += draws.delta[d];
    s.omega_mean += draws.omega[d];
    if (has_varphi) varphi_sum += draws.varphi[d];
  }
  const double inv = 1.0 / static_cast<double>(count);
  s.mu_mean *= inv;
  s.delta_mean *= inv;
  s.omega_mean *= inv;
  if (has_varphi) s.varphi_mean = varphi_sum * inv;

  std::vector<Vector> flat;
  flat.reserve(count);
  for (std::size_t d = 0; d < count; ++d) {
    flat.push_back(flatten_draw(draws.mu[d], draws.delta[d], draws.omega[d], layout,
                                has_varphi ? std::optional<double>(draws.varphi[d])
                                           : std::nullopt));
  }
  const Index width = flat.front().size();
  s.quantiles = {Vector(width), Vector(width), Vector(width)};
  std::vector<double> column(count);
  for (Index k = 0; k < width; ++k) {
    for (std::size_t d = 0; d < count; ++d) column[d] = flat[d](k);
    std::sort(column.begin(), column.end());
    s.quantiles.q025(k) = quantile_sorted(column, 0.025);
    s.quantiles.q500(k) = quantile_sorted(column, 0.5);
    s.quantiles.q975(k) = quantile_sorted(column, 0.975);
  }
  s.draws = std::move(draws);
  return s;
}

ChainSummary run_chain_from(ChainState state, const model::Dataset& data,
                            const model::PriorConfig& prior, const ChainConfig& config,
                            RngStream& rng, const SweepPlan& plan, const DrawObserver& observer) {
  config.validate();
  prior.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool skew_t = prior.tail == model::Tail::SkewT;
  const Index total = config.burn_in + config.draws;

  DrawBuffer buffer;
  const auto reserve = static_cast<std::size_t>(config.store_draws ? config.stored_count() : 0);
  buffer.mu.reserve(reserve);
  buffer.delta.reserve(reserve);
  buffer.omega.reserve(reserve);

  const Index n = data.N();
  Vector mu_sum = Vector::Zero(n);
  Matrix delta_sum = Matrix::Zero(n, n);
  Matrix omega_sum = Matrix::Zero(n, n);
  double varphi_sum = 0.0;

  Index stored = 0;
  for (Index it = 0; it < total; ++it) {
    try {
      gibbs_sweep(state, data, prior, rng, plan);
    } catch (const Error& e) {
      throw Error("sweep " + std::to_string(it) + ": " + e.what());
    }
    const Index k = it - config.burn_in;
    if (k < 0 || (k + 1) % config.thin != 0) continue;
    if (config.store_draws) {
      buffer.mu.push_back(state.params.mu);
      buffer.delta.push_back(state.params.delta);
      buffer.omega.push_back(state.params.omega.matrix());
      if (skew_t) buffer.varphi.push_back(state.varphi);
      if (config.store_latent) buffer.latent.push_back(state.latent.Z);
    } else {
      mu_sum += state.params.mu;
      delta_sum += state.params.delta;
      omega_sum += state.params.omega.matrix();
      varphi_sum += state.varphi;
    }
    if (observer) observer(stored, state);
    ++stored;
  }

  ChainSummary summary;
  if (config.store_draws) {
    summary = summarize_draws(std::move(buffer), prior.variant, prior.tail);
  } else {
    const double inv = 1.0 / static_cast<double>(stored);
    summary.variant = prior.variant;
    summary.tail = prior.tail;
    summary.stored_draws = stored;
    summary.mu_mean = mu_sum * inv;
    summary.delta_mean = delta_sum * inv;
    summary.omega_mean = omega_sum * inv;
    if (skew_t) summary.varphi_mean = varphi_sum * inv;
  }
  summary.iterations = total;
  if (state.varphi_proposed > 0) {
    summary.varphi_acceptance = static_cast<double>(state.varphi_accepted) /
                                static_cast<double>(state.varphi_proposed);
  }
  summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

ChainSummary run_chain(const model::Dataset& data, const model::PriorConfig& prior,
                       const ChainConfig& config, RngStream& rng, const SweepPlan& plan,
                       const DrawObserver& observer) {
  return run_chain_from(initial_state(data, prior, rng), data, prior, config, rng, plan,
                        observer);
}

}  // namespace skewgibbs::gibbs
