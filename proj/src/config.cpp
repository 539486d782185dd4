#include "skewgibbs/config.hpp"

#include <set>

#include "json.hpp"

namespace skewgibbs::io {

using nlohmann::json;

std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::GenData: return "gen-data";
    case Mode::Fit: return "fit";
    case Mode::Study: return "study";
    case Mode::Summarize: return "summarize";
  }
  return "fit";
}

bool RunConfig::operator==(const RunConfig& o) const {
  return mode == o.mode && data == o.data && out == o.out && variant == o.variant &&
         tail == o.tail && T == o.T && N == o.N && chain.burn_in == o.chain.burn_in &&
         chain.draws == o.chain.draws && chain.thin == o.chain.thin &&
         chain.store_latent == o.chain.store_latent && prior == o.prior && seed == o.seed &&
         workers == o.workers && long_run == o.long_run && designs == o.designs &&
         variants == o.variants && reps == o.reps;
}

namespace {

Mode parse_mode(const std::string& s, const std::string& path) {
  if (s == "gen-data") return Mode::GenData;
  if (s == "fit") return Mode::Fit;
  if (s == "study") return Mode::Study;
  if (s == "summarize") return Mode::Summarize;
  throw SchemaError(path, "expected one of gen-data, fit, study, summarize");
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw SchemaError(prefix + key, "unknown key");
  }
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw SchemaError(path, "expected a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw SchemaError(path, "expected a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& path, std::int64_t min) {
  if (!v.is_number_integer()) throw SchemaError(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < min) throw SchemaError(path, "must be >= " + std::to_string(min));
  return x;
}

bool get_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) throw SchemaError(path, "expected a boolean");
  return v.get<bool>();
}

double get_positive(const json& v, const std::string& path) {
  const double x = get_number(v, path);
  if (!(x > 0.0)) throw SchemaError(path, "must be > 0");
  return x;
}

template <typename T, typename Parse>
std::vector<T> get_list(const json& v, const std::string& path, Parse parse) {
  if (!v.is_array() || v.empty()) throw SchemaError(path, "expected a non-empty array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto p = path + "[" + std::to_string(i) + "]";
    try {
      out.push_back(parse(get_string(v[i], p)));
    } catch (const UnknownKind& e) {
      throw SchemaError(p, e.what());
    }
  }
  return out;
}

void parse_chain(const json& c, gibbs::ChainConfig& chain) {
  if (!c.is_object()) throw SchemaError("chain", "expected an object");
  reject_unknown(c, {"burn_in", "draws", "thin", "store_latent"}, "chain.");
  if (auto v = find(c, "burn_in")) chain.burn_in = get_integer(*v, "chain.burn_in", 0);
  if (auto v = find(c, "draws")) chain.draws = get_integer(*v, "chain.draws", 1);
  if (auto v = find(c, "thin")) chain.thin = get_integer(*v, "chain.thin", 1);
  if (auto v = find(c, "store_latent")) chain.store_latent = get_bool(*v, "chain.store_latent");
  if (chain.draws < chain.thin) throw SchemaError("chain.draws", "must be >= chain.thin");
}

void parse_prior(const json& p, model::PriorSettings& s) {
  if (!p.is_object()) throw SchemaError("prior", "expected an object");
  reject_unknown(p,
                 {"b_mu", "A_mu_scale", "b_delta", "A_delta_scale", "S_Omega_scale", "nu_Omega",
                  "a_eta", "b_eta", "a_varphi", "b_varphi"},
                 "prior.");
  if (auto v = find(p, "b_mu")) s.b_mu = get_number(*v, "prior.b_mu");
  if (auto v = find(p, "A_mu_scale")) s.A_mu_scale = get_positive(*v, "prior.A_mu_scale");
  if (auto v = find(p, "b_delta")) s.b_delta = get_number(*v, "prior.b_delta");
  if (auto v = find(p, "A_delta_scale")) s.A_delta_scale = get_positive(*v, "prior.A_delta_scale");
  if (auto v = find(p, "S_Omega_scale"); v && !v->is_null()) {
    s.S_Omega_scale = get_positive(*v, "prior.S_Omega_scale");
  }
  if (auto v = find(p, "nu_Omega"); v && !v->is_null()) {
    s.nu_Omega = get_positive(*v, "prior.nu_Omega");
  }
  if (auto v = find(p, "a_eta")) s.a_eta = get_positive(*v, "prior.a_eta");
  if (auto v = find(p, "b_eta")) {
    s.b_eta = get_number(*v, "prior.b_eta");
    if (s.b_eta < 0.0) throw SchemaError("prior.b_eta", "must be >= 0");
  }
  if (auto v = find(p, "a_varphi")) s.a_varphi = get_positive(*v, "prior.a_varphi");
  if (auto v = find(p, "b_varphi")) s.b_varphi = get_positive(*v, "prior.b_varphi");
}

}  // namespace

RunConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("$", "expected a JSON object");
  reject_unknown(doc,
                 {"mode", "data", "out", "variant", "tail", "T", "N", "chain", "prior", "seed",
                  "workers", "long_run", "designs", "variants", "reps"},
                 "");
  RunConfig c;
  if (auto v = find(doc, "mode")) c.mode = parse_mode(get_string(*v, "mode"), "mode");
  if (auto v = find(doc, "data")) c.data = get_string(*v, "data");
  if (auto v = find(doc, "out")) c.out = get_string(*v, "out");
  try {
    if (auto v = find(doc, "variant")) c.variant = model::parse_variant(get_string(*v, "variant"));
  } catch (const UnknownKind& e) {
    throw SchemaError("variant", e.what());
  }
  try {
    if (auto v = find(doc, "tail")) c.tail = model::parse_tail(get_string(*v, "tail"));
  } catch (const UnknownKind& e) {
    throw SchemaError("tail", e.what());
  }
  if (auto v = find(doc, "T")) c.T = get_integer(*v, "T", 1);
  if (auto v = find(doc, "N")) c.N = get_integer(*v, "N", 1);
  if (auto v = find(doc, "chain")) parse_chain(*v, c.chain);
  if (auto v = find(doc, "prior")) parse_prior(*v, c.prior);
  if (auto v = find(doc, "seed")) c.seed = static_cast<std::uint64_t>(get_integer(*v, "seed", 0));
  if (auto v = find(doc, "workers")) c.workers = static_cast<unsigned>(get_integer(*v, "workers", 1));
  if (auto v = find(doc, "long_run")) c.long_run = get_bool(*v, "long_run");
  if (auto v = find(doc, "designs")) {
    c.designs = get_list<simstudy::DesignKind>(*v, "designs", simstudy::parse_design);
  }
  if (auto v = find(doc, "variants")) {
    c.variants = get_list<model::Variant>(*v, "variants", model::parse_variant);
  }
  if (auto v = find(doc, "reps")) c.reps = get_integer(*v, "reps", 1);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  json prior = {
      {"b_mu", c.prior.b_mu},
      {"A_mu_scale", c.prior.A_mu_scale},
      {"b_delta", c.prior.b_delta},
      {"A_delta_scale", c.prior.A_delta_scale},
      {"S_Omega_scale", c.prior.S_Omega_scale ? json(*c.prior.S_Omega_scale) : json(nullptr)},
      {"nu_Omega", c.prior.nu_Omega ? json(*c.prior.nu_Omega) : json(nullptr)},
      {"a_eta", c.prior.a_eta},
      {"b_eta", c.prior.b_eta},
      {"a_varphi", c.prior.a_varphi},
      {"b_varphi", c.prior.b_varphi},
  };
  json designs = json::array();
  for (auto d : c.designs) designs.push_back(std::string(simstudy::to_string(d)));
  json variants = json::array();
  for (auto v : c.variants) variants.push_back(std::string(model::to_string(v)));
  json doc = {
      {"mode", std::string(to_string(c.mode))},
      {"data", c.data},
      {"out", c.out},
      {"variant", std::string(model::to_string(c.variant))},
      {"tail", std::string(model::to_string(c.tail))},
      {"T", c.T},
      {"N", c.N},
      {"chain",
       {{"burn_in", c.chain.burn_in},
        {"draws", c.chain.draws},
        {"thin", c.chain.thin},
        {"store_latent", c.chain.store_latent}}},
      {"prior", prior},
      {"seed", c.seed},
      {"workers", c.workers},
      {"long_run", c.long_run},
      {"designs", designs},
      {"variants", variants},
      {"reps", c.reps},
  };
  return doc.dump(2) + "\n";
}

simstudy::StudyConfig to_study_config(const RunConfig& c, bool full_scale) {
  simstudy::StudyConfig s;
  if (full_scale || c.long_run) s = simstudy::StudyConfig::full_scale();
  if (!(full_scale || c.long_run)) {
    s.T = c.T;
    s.N = c.N;
    s.reps = c.reps;
    s.chain = c.chain;
  }
  s.designs = c.designs;
  s.variants = c.variants;
  s.prior = c.prior;
  s.base_seed = c.seed;
  s.workers = c.workers;
  return s;
}

}  // namespace skewgibbs::io
