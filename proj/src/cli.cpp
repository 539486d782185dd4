#include "skewgibbs/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skewgibbs/chain_io.hpp"
#include "skewgibbs/config.hpp"

namespace skewgibbs::io {

namespace fs = std::filesystem;

namespace {

// Thrown for bad flag values so they map to the config exit code.
struct UsageError : Error {
  using Error::Error;
};

RunConfig load_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text(path);
  } catch (const IoError& e) {
    throw SchemaError("$", e.what());
  }
  return parse_config(text);
}

void write_metadata(const fs::path& dir, const nlohmann::json& meta) {
  atomic_write(dir / "metadata.json", meta.dump(2) + "\n");
}

int gen_data(const std::string& design_name, Index n, Index t, std::uint64_t seed,
             const std::string& tail_name, double varphi, const fs::path& out_dir,
             std::ostream& out) {
  simstudy::DesignKind design;
  model::Tail tail;
  try {
    design = simstudy::parse_design(design_name);
    tail = model::parse_tail(tail_name);
  } catch (const UnknownKind& e) {
    throw UsageError(e.what());
  }
  if (n < 1 || t < 1) throw UsageError("--n and --t must be >= 1");
  const Matrix delta = simstudy::make_delta_design(design, n);
  const auto omega = numerics::SpdMatrix::identity(n);
  const Vector mu = Vector::Zero(n);
  RngStream rng(seed, simstudy::data_stream(0));
  const auto data =
      simstudy::simulate_data(mu, delta, omega, t, rng,
                              tail == model::Tail::SkewT ? std::optional(varphi) : std::nullopt);
  write_matrix_csv(out_dir / "data.csv", data.R());
  write_matrix_csv(out_dir / "truth_mu.csv", mu);
  write_matrix_csv(out_dir / "truth_delta.csv", delta);
  write_matrix_csv(out_dir / "truth_omega.csv", omega.matrix());
  out << "wrote " << t << "x" << n << " data to " << (out_dir / "data.csv").string() << "\n";
  return kExitOk;
}

int fit(const fs::path& config_path, const std::string& data_override,
        const std::string& out_override, std::ostream& out) {
  const auto config = load_config(config_path);
  const fs::path data_path = data_override.empty() ? fs::path(config.data) : fs::path(data_override);
  const fs::path out_dir = out_override.empty() ? fs::path(config.out) : fs::path(out_override);
  if (data_path.empty()) throw SchemaError("data", "no data path given");
  const model::Dataset data(read_matrix_csv(data_path));
  const auto prior = model::make_prior(config.prior, data.N(), config.variant, config.tail);
  RngStream rng(config.seed, simstudy::chain_stream(0, config.variant));
  const auto summary = gibbs::run_chain(data, prior, config.chain, rng);

  const auto layout = prior.layout();
  write_chain(out_dir / "chain.csv", summary.draws, layout);
  write_summary_csv(out_dir / "summary.csv", summary, layout);
  write_posterior_means(out_dir, summary);
  atomic_write(out_dir / "config.json", serialize_config(config));
  write_metadata(out_dir, {{"wall_seconds", summary.wall_seconds},
                           {"iterations", summary.iterations},
                           {"stored_draws", summary.stored_draws},
                           {"varphi_acceptance", summary.varphi_acceptance}});
  out << model::to_string(config.variant) << ": " << summary.stored_draws << " draws in "
      << summary.wall_seconds << " s -> " << out_dir.string() << "\n";
  return kExitOk;
}

int study(const fs::path& config_path, const std::string& out_override, bool full_scale,
          std::ostream& out) {
  auto config = load_config(config_path);
  if (const char* w = std::getenv("SKEWGIBBS_WORKERS")) {
    const int k = std::atoi(w);
    if (k < 1) throw UsageError("SKEWGIBBS_WORKERS must be a positive integer");
    config.workers = static_cast<unsigned>(k);
  }
  const fs::path out_dir = out_override.empty() ? fs::path(config.out) : fs::path(out_override);
  const auto sc = to_study_config(config, full_scale);
  const auto report = simstudy::run_study(sc);

  write_study_jobs_csv(out_dir / "jobs.csv", report.jobs);
  write_study_summary_csv(out_dir / "summary.csv", report.cells);
  for (auto d : sc.designs) {
    const std::string dn(simstudy::to_string(d));
    write_matrix_csv(out_dir / "truth" / (dn + "_delta.csv"),
                     simstudy::make_delta_design(d, sc.N));
    write_matrix_csv(out_dir / "truth" / (dn + "_omega.csv"), Matrix::Identity(sc.N, sc.N));
  }
  // Posterior means of the first replication feed the heatmap panels.
  Index failed = 0;
  std::string first_error;
  for (const auto& j : report.jobs) {
    if (!j.ok) {
      if (failed++ == 0) {
        first_error = std::string(simstudy::to_string(j.design)) + " " +
                      std::string(model::to_string(j.variant)) + " rep " +
                      std::to_string(j.rep + 1) + ": " + j.error;
      }
      continue;
    }
    if (j.rep != 0) continue;
    const std::string stem = std::string(simstudy::to_string(j.design)) + "_" +
                             std::string(model::to_string(j.variant));
    write_matrix_csv(out_dir / "means" / (stem + "_delta.csv"), j.delta_mean);
    write_matrix_csv(out_dir / "means" / (stem + "_omega.csv"), j.omega_mean);
  }
  atomic_write(out_dir / "config.json", serialize_config(config));
  nlohmann::json times = nlohmann::json::array();
  for (const auto& j : report.jobs) times.push_back(j.seconds);
  write_metadata(out_dir, {{"wall_seconds", report.wall_seconds},
                           {"workers", sc.workers},
                           {"full_scale", full_scale || config.long_run},
                           {"job_seconds", times}});
  for (const auto& c : report.cells) {
    out << simstudy::to_string(c.design) << " " << model::to_string(c.variant)
        << ": delta " << c.median_delta_loss << " (" << c.se_delta_loss << "), omega "
        << c.median_omega_loss << " (" << c.se_omega_loss << ")\n";
  }
  if (failed > 0) {
    throw Error(std::to_string(failed) + " job(s) failed (first: " + first_error + "); see jobs.csv");
  }
  return kExitOk;
}

int summarize(const std::vector<std::string>& chains, const fs::path& out_dir,
              const std::string& true_delta, const std::string& true_omega, std::ostream& out) {
  if (true_delta.empty() != true_omega.empty()) {
    throw UsageError("--true-delta and --true-omega go together");
  }
  std::string losses = "chain,delta_loss,omega_loss\n";
  const bool with_truth = !true_delta.empty();
  Matrix td, to;
  if (with_truth) {
    td = read_matrix_csv(true_delta);
    to = read_matrix_csv(true_omega);
  }
  for (const auto& c : chains) {
    auto table = read_chain(c);
    const auto variant = table.layout.shape() == model::DeltaLayout::Shape::Full
                             ? model::Variant::FullNOWI
                             : model::Variant::LTNOWI;
    const auto tail = table.has_varphi ? model::Tail::SkewT : model::Tail::SkewNormal;
    const auto summary = gibbs::summarize_draws(std::move(table.draws), variant, tail);
    const std::string stem = fs::path(c).stem().string();
    write_summary_csv(out_dir / (stem + "_summary.csv"), summary, table.layout);
    write_posterior_means(out_dir, summary, stem + "_");
    if (with_truth) {
      losses += stem + ',' + format_double(simstudy::frobenius_loss(summary.delta_mean, td)) +
                ',' + format_double(simstudy::frobenius_loss(summary.omega_mean, to)) + '\n';
    }
    out << stem << ": " << summary.stored_draws << " draws summarized\n";
  }
  if (with_truth) atomic_write(out_dir / "losses.csv", losses);
  return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian skew-normal / skew-t estimation with identified skewness matrices",
               "skewgibbs"};
  app.require_subcommand(1);

  std::string design = "diag", tail = "skew-normal", out_dir = "out";
  Index n = 4, t = 100;
  std::uint64_t seed = 1;
  double varphi = 8.0;
  auto* gen = app.add_subcommand("gen-data", "simulate a design dataset and its truth files");
  gen->add_option("--design", design, "diag | sparse | dense")->required();
  gen->add_option("--n", n, "dimension N")->required();
  gen->add_option("--t", t, "observations T")->required();
  gen->add_option("--seed", seed, "RNG seed")->required();
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--tail", tail, "skew-normal | skew-t");
  gen->add_option("--varphi", varphi, "degrees of freedom for skew-t data");

  std::string config_path, data_path, fit_out;
  auto* fitc = app.add_subcommand("fit", "run one chain on a data CSV");
  fitc->add_option("--config", config_path, "run config JSON")->required();
  fitc->add_option("--data", data_path, "T x N data CSV (overrides config)");
  fitc->add_option("--out", fit_out, "output directory (overrides config)");

  std::string study_config, study_out;
  bool full_scale = false;
  auto* st = app.add_subcommand("study", "run the design x variant x replication study");
  st->add_option("--config", study_config, "run config JSON")->required();
  st->add_option("--out", study_out, "output directory (overrides config)");
  st->add_flag("--full-scale", full_scale, "N=15, T=1500, 30 reps, 50k+100k iterations");

  std::vector<std::string> chains;
  std::string sum_out, true_delta, true_omega;
  auto* sm = app.add_subcommand("summarize", "posterior means, quantiles and losses of chains");
  sm->add_option("--chains", chains, "chain CSV files")->required();
  sm->add_option("--out", sum_out, "output directory")->required();
  sm->add_option("--true-delta", true_delta, "true Delta CSV");
  sm->add_option("--true-omega", true_omega, "true Omega CSV");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*gen) return gen_data(design, n, t, seed, tail, varphi, out_dir, out);
    if (*fitc) return fit(config_path, data_path, fit_out, out);
    if (*st) return study(study_config, study_out, full_scale, out);
    return summarize(chains, sum_out, true_delta, true_omega, out);
  } catch (const SchemaError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace skewgibbs::io
