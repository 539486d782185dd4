#include "skewgibbs/simstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <thread>

namespace skewgibbs::simstudy {

std::string_view to_string(DesignKind k) {
  switch (k) {
    case DesignKind::Diag: return "diag";
    case DesignKind::Sparse: return "sparse";
    case DesignKind::Dense: return "dense";
  }
  return "unknown";
}

DesignKind parse_design(std::string_view text) {
  std::string s;
  for (char c : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "diag") return DesignKind::Diag;
  if (s == "sparse") return DesignKind::Sparse;
  if (s == "dense") return DesignKind::Dense;
  throw UnknownKind("unknown design '" + std::string(text) + "'");
}

Matrix make_delta_design(DesignKind kind, Index n) {
  if (n < 1) throw DimensionMismatch("make_delta_design: N must be >= 1");
  if (kind != DesignKind::Diag && kind != DesignKind::Sparse && kind != DesignKind::Dense) {
    throw UnknownKind("make_delta_design: unknown design kind");
  }
  Matrix d = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    // 1-based odd rows get +2, even rows -2.
    d(i, i) = i % 2 == 0 ? 2.0 : -2.0;
    if (kind == DesignKind::Diag) continue;
    if (i >= 1) d(i, i - 1) = -1.0;
    if (kind == DesignKind::Dense) {
      for (Index j = 0; j + 1 < i; ++j) d(i, j) = 1.0;
    }
  }
  return d;
}

model::Dataset simulate_data(const Vector& mu, const Matrix& delta,
                             const numerics::SpdMatrix& omega, Index t_count, RngStream& rng,
                             std::optional<double> varphi) {
  const Index n = mu.size();
  if (delta.rows() != n || delta.cols() != n || omega.dim() != n) {
    throw DimensionMismatch("simulate_data: mu, Delta, Omega sizes disagree");
  }
  if (t_count < 0) throw DimensionMismatch("simulate_data: T must be >= 0");
  if (varphi && !(*varphi > 0.0)) throw NonPositiveParameter("simulate_data: varphi must be > 0");
  Matrix r(t_count, n);
  const Vector zero = Vector::Zero(n);
  Vector z(n);
  for (Index t = 0; t < t_count; ++t) {
    double scale = 1.0;
    if (varphi) {
      scale = 1.0 / std::sqrt(distributions::draw_gamma(0.5 * *varphi, 0.5 * *varphi, rng));
    }
    for (Index i = 0; i < n; ++i) z(i) = std::abs(rng.normal());
    const Vector eps = distributions::draw_mvn_from_precision(zero, omega, rng);
    r.row(t) = (mu + scale * (delta * z + eps)).transpose();
  }
  return model::Dataset(std::move(r));
}

double frobenius_loss(const Matrix& estimate, const Matrix& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols()) {
    throw DimensionMismatch("frobenius_loss: shapes differ");
  }
  return (estimate - truth).norm();
}

double column_assignment_entropy(const std::vector<Matrix>& deltas) {
  if (deltas.empty()) return 0.0;
  const Index n = deltas.front().rows();
  const Index cols = deltas.front().cols();
  double total = 0.0;
  for (Index j = 0; j < cols; ++j) {
    std::vector<double> counts(static_cast<std::size_t>(n), 0.0);
    for (const auto& d : deltas) {
      Index row = 0;
      d.col(j).cwiseAbs().maxCoeff(&row);
      counts[static_cast<std::size_t>(row)] += 1.0;
    }
    const double m = static_cast<double>(deltas.size());
    double h = 0.0;
    for (double c : counts) {
      if (c > 0.0) h -= (c / m) * std::log(c / m);
    }
    total += h;
  }
  return total / static_cast<double>(cols);
}

std::uint64_t design_seed(std::uint64_t base_seed, DesignKind kind) {
  return base_seed + 1000003ULL * static_cast<std::uint64_t>(kind);
}

std::uint64_t chain_stream(Index rep, model::Variant v) {
  return static_cast<std::uint64_t>(rep) * kStreamsPerReplication +
         static_cast<std::uint64_t>(model::variant_index(v));
}

std::uint64_t data_stream(Index rep) {
  return static_cast<std::uint64_t>(rep) * kStreamsPerReplication + kDataStreamSlot;
}

StudyConfig StudyConfig::full_scale() {
  StudyConfig c;
  c.T = 1500;
  c.N = 15;
  c.reps = 30;
  c.chain = {50000, 100000, 1, false};
  return c;
}

void StudyConfig::validate() const {
  if (reps < 1) throw NonPositiveParameter("study: reps must be >= 1");
  if (T < 1 || N < 1) throw NonPositiveParameter("study: T and N must be >= 1");
  if (designs.empty() || variants.empty()) {
    throw NonPositiveParameter("study: need at least one design and one variant");
  }
  chain.validate();
}

const CellSummary& StudyReport::cell(DesignKind d, model::Variant v) const {
  for (const auto& c : cells) {
    if (c.design == d && c.variant == v) return c;
  }
  throw IndexOutOfRange("StudyReport::cell: no such cell");
}

double median(std::vector<double> values) {
  if (values.empty()) throw DimensionMismatch("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

double standard_error(const std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

std::vector<JobResult> plan_jobs(const StudyConfig& config) {
  std::vector<JobResult> jobs;
  for (auto d : config.designs) {
    for (Index rep = 0; rep < config.reps; ++rep) {
      for (auto v : config.variants) {
        JobResult j;
        j.design = d;
        j.variant = v;
        j.rep = rep;
        j.seed = design_seed(config.base_seed, d);
        j.stream = chain_stream(rep, v);
        jobs.push_back(std::move(j));
      }
    }
  }
  return jobs;
}

void run_job(const StudyConfig& config, JobResult& job) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const Matrix truth = make_delta_design(job.design, config.N);
    const auto omega = numerics::SpdMatrix::identity(config.N);
    RngStream data_rng(job.seed, data_stream(job.rep));
    const auto data = simulate_data(Vector::Zero(config.N), truth, omega, config.T, data_rng);
    const auto prior = model::make_prior(config.prior, config.N, job.variant);
    RngStream chain_rng(job.seed, job.stream);
    auto chain = config.chain;
    chain.store_draws = false;
    const auto summary = gibbs::run_chain(data, prior, chain, chain_rng);
    job.delta_mean = summary.delta_mean;
    job.omega_mean = summary.omega_mean;
    job.delta_loss = frobenius_loss(summary.delta_mean, truth);
    job.omega_loss = frobenius_loss(summary.omega_mean, omega.matrix());
    job.iterations = summary.iterations;
    job.ok = true;
  } catch (const std::exception& e) {
    job.ok = false;
    job.error = e.what();
  }
  job.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<CellSummary> aggregate(const StudyConfig& config, const std::vector<JobResult>& jobs) {
  std::vector<CellSummary> cells;
  for (auto d : config.designs) {
    for (auto v : config.variants) {
      std::vector<double> dl, ol;
      for (const auto& j : jobs) {
        if (j.design == d && j.variant == v && j.ok) {
          dl.push_back(j.delta_loss);
          ol.push_back(j.omega_loss);
        }
      }
      CellSummary c;
      c.design = d;
      c.variant = v;
      c.reps_ok = static_cast<Index>(dl.size());
      if (!dl.empty()) {
        c.median_delta_loss = median(dl);
        c.se_delta_loss = standard_error(dl);
        c.median_omega_loss = median(ol);
        c.se_omega_loss = standard_error(ol);
      }
      cells.push_back(c);
    }
  }
  return cells;
}

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  StudyReport report;
  report.config = config;
  report.jobs = plan_jobs(config);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= report.jobs.size()) return;
      run_job(config, report.jobs[k]);
    }
  };
  const unsigned workers =
      std::max(1u, std::min<unsigned>(config.workers,
                                      static_cast<unsigned>(report.jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  report.cells = aggregate(config, report.jobs);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace skewgibbs::simstudy
