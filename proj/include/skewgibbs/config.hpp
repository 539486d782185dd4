#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "skewgibbs/gibbs.hpp"
#include "skewgibbs/simstudy.hpp"

namespace skewgibbs::io {

enum class Mode { GenData, Fit, Study, Summarize };

std::string_view to_string(Mode m);

/// Everything a CLI run needs. Parsed from JSON (schema/run_config.schema.json);
/// absent keys take the defaults below, unknown keys are rejected.
struct RunConfig {
  Mode mode = Mode::Fit;
  std::string data;
  std::string out = "out";
  model::Variant variant = model::Variant::LTNOWI;
  model::Tail tail = model::Tail::SkewNormal;
  Index T = 600;
  Index N = 6;
  gibbs::ChainConfig chain{3000, 6000, 1, false};
  model::PriorSettings prior;
  std::uint64_t seed = 20240101;
  unsigned workers = 1;
  bool long_run = false;
  // study mode
  std::vector<simstudy::DesignKind> designs{simstudy::DesignKind::Diag,
                                            simstudy::DesignKind::Sparse,
                                            simstudy::DesignKind::Dense};
  std::vector<model::Variant> variants{model::Variant::FullNOWI, model::Variant::LTNOWI,
                                       model::Variant::LTHSGHS};
  Index reps = 5;

  bool operator==(const RunConfig& other) const;
};

/// Throws SchemaError naming the offending field path.
RunConfig parse_config(std::string_view json_text);
std::string serialize_config(const RunConfig& config);

/// Study settings for `config`; `full_scale` (or config.long_run) swaps in
/// N = 15, T = 1500, 30 replications and 50k + 100k iterations.
simstudy::StudyConfig to_study_config(const RunConfig& config, bool full_scale);

}  // namespace skewgibbs::io
