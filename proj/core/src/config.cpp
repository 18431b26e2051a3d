#include "varcvar/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace varcvar {

using nlohmann::json;

std::string_view to_string(IsMode m) {
  switch (m) {
    case IsMode::none: return "none";
    case IsMode::translation: return "translation";
    case IsMode::esscher: return "esscher";
  }
  return "?";
}

std::string_view to_string(Phase2Mode m) { return m == Phase2Mode::adaptive ? "adaptive" : "frozen"; }

namespace {

// Reads typed fields out of one JSON object and remembers which keys were used.
class Reader {
 public:
  Reader(const json& obj, std::string path, std::vector<std::string>& warnings)
      : obj_(obj), path_(std::move(path)), warnings_(warnings) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a JSON object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(field(key), std::string("wrong type (") + e.what() + ")");
    }
  }

  bool has(const char* key) const { return obj_.contains(key); }
  const json& at(const char* key) {
    seen_.insert(key);
    return obj_.at(key);
  }
  std::string field(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) warnings_.push_back("unknown key '" + field(it.key().c_str()) + "' ignored");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::vector<std::string>& warnings_;
  std::set<std::string> seen_;
};

ModelSpec parse_model(const json& j, std::vector<std::string>& warnings) {
  Reader r(j, "model", warnings);
  std::string id;
  r.get("id", id);
  if (id.empty()) throw ConfigError("model.id", "required (short_put, basket, spark_spread, nig_call)");
  ModelSpec out;
  if (id == "short_put") {
    GbmSpec s;
    r.get("s0", s.s0);
    r.get("sigma", s.sigma);
    r.get("r", s.r);
    r.get("maturity", s.maturity);
    r.get("strike", s.strike);
    r.get("quantity", s.quantity);
    r.get("premium", s.premium);
    out = s;
  } else if (id == "basket") {
    BasketSpec s;
    r.get("n_assets", s.n_assets);
    r.get("s0", s.s0);
    r.get("sigma", s.sigma);
    r.get("r", s.r);
    r.get("maturity", s.maturity);
    r.get("call_strike", s.call_strike);
    r.get("put_strike", s.put_strike);
    r.get("calls_per_asset", s.calls_per_asset);
    r.get("puts_per_asset", s.puts_per_asset);
    r.get("call_premium", s.call_premium);
    r.get("put_premium", s.put_premium);
    out = s;
  } else if (id == "spark_spread") {
    SparkSpreadSpec s;
    r.get("days", s.days);
    r.get("day_count", s.day_count);
    r.get("se0", s.se0);
    r.get("sg0", s.sg0);
    r.get("heat_rate", s.heat_rate);
    r.get("generation_cost", s.generation_cost);
    r.get("call_strike", s.call_strike);
    r.get("correlation", s.correlation);
    r.get("mean_reversion", s.mean_reversion);
    r.get("sigma_e", s.sigma_e);
    r.get("sigma_g", s.sigma_g);
    r.get("r", s.r);
    r.get("plant_premium", s.plant_premium);
    r.get("call_premium", s.call_premium);
    out = s;
  } else if (id == "nig_call") {
    NigCallSpec s;
    r.get("alpha", s.nig.alpha);
    r.get("beta", s.nig.beta);
    r.get("delta", s.nig.delta);
    r.get("mu", s.nig.mu);
    r.get("strike", s.strike);
    r.get("notional", s.notional);
    r.get("r", s.r);
    r.get("maturity", s.maturity);
    r.get("premium", s.premium);
    out = s;
  } else {
    throw ConfigError("model.id", "unknown model '" + id + "'");
  }
  r.finish();
  std::visit(
      [](const auto& s) {
        try {
          s.validate();
        } catch (const std::invalid_argument& e) {
          throw ConfigError("model", e.what());
        }
      },
      out);
  return out;
}

// Accepts `0.95` as well as `[0.95, 0.99]`.
template <class T>
std::vector<T> scalar_or_list(Reader& r, const char* key) {
  const json& j = r.at(key);
  try {
    if (j.is_array()) return j.get<std::vector<T>>();
    return {j.get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError(r.field(key), std::string("wrong type (") + e.what() + ")");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (!has_model) throw ConfigError("model", "required");
  if (alphas.empty()) throw ConfigError("alpha", "at least one level required");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha", "levels must lie in the open interval (0, 1)");
  if (n_steps.empty()) throw ConfigError("n_steps", "at least one value required");
  for (auto n : n_steps)
    if (n < 1) throw ConfigError("n_steps", "must be >= 1");
  for (auto n : n_steps)
    if (burn_in >= n) throw ConfigError("burn_in", "must be smaller than every n_steps");
  if (replications < 1) throw ConfigError("replications", "must be >= 1");
  if (workers < 1) throw ConfigError("workers", "must be >= 1");
  if (pilot_size < 1) throw ConfigError("pilot_size", "must be >= 1");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw ConfigError("ci_level", "must lie in (0, 1)");
  try {
    schedule.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("schedule", e.what());
  }
  if (psi != "identity" && psi != "square") throw ConfigError("psi", "expected identity or square");
  if (is_mode == IsMode::esscher && !std::holds_alternative<NigCallSpec>(model))
    throw ConfigError("is_mode", "esscher needs the nig_call model");
  if (!(esscher.lambda > 0.0)) throw ConfigError("esscher.lambda", "must be > 0");
  if (!(esscher.domain_margin > 0.0 && esscher.domain_margin < 0.5))
    throw ConfigError("esscher.domain_margin", "must lie in (0, 0.5)");
}

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("JSON parse error: ") + e.what());
  }
  RunConfig cfg;
  Reader r(doc, "", cfg.warnings);

  if (r.has("model")) {
    cfg.model = parse_model(r.at("model"), cfg.warnings);
    cfg.has_model = true;
  }
  r.get("psi", cfg.psi);
  if (r.has("alpha")) cfg.alphas = scalar_or_list<double>(r, "alpha");
  if (r.has("n_steps")) cfg.n_steps = scalar_or_list<std::size_t>(r, "n_steps");
  r.get("phase1_steps", cfg.phase1_steps);
  if (r.has("is_mode")) {
    std::string m;
    r.get("is_mode", m);
    if (m == "none") cfg.is_mode = IsMode::none;
    else if (m == "translation") cfg.is_mode = IsMode::translation;
    else if (m == "esscher") cfg.is_mode = IsMode::esscher;
    else throw ConfigError("is_mode", "expected none, translation or esscher, got '" + m + "'");
  }
  if (r.has("phase2_mode")) {
    std::string m;
    r.get("phase2_mode", m);
    if (m == "adaptive") cfg.phase2_mode = Phase2Mode::adaptive;
    else if (m == "frozen") cfg.phase2_mode = Phase2Mode::frozen;
    else throw ConfigError("phase2_mode", "expected adaptive or frozen, got '" + m + "'");
  }
  r.get("replications", cfg.replications);
  r.get("seed", cfg.seed);
  r.get("workers", cfg.workers);
  r.get("output", cfg.output);
  r.get("pilot_size", cfg.pilot_size);
  r.get("burn_in", cfg.burn_in);
  if (r.has("c0_start")) {
    std::string m;
    r.get("c0_start", m);
    if (m == "pilot") cfg.c_start = CStart::pilot;
    else if (m == "zero") cfg.c_start = CStart::zero;
    else throw ConfigError("c0_start", "expected pilot or zero, got '" + m + "'");
  }
  r.get("ci_level", cfg.ci_level);
  r.get("record_wall_time", cfg.record_wall_time);
  if (r.has("schedule")) {
    Reader s(r.at("schedule"), "schedule", cfg.warnings);
    s.get("gamma1", cfg.schedule.gamma1);
    s.get("exponent", cfg.schedule.exponent);
    s.get("offset", cfg.schedule.offset);
    s.finish();
  }
  if (r.has("esscher")) {
    Reader e(r.at("esscher"), "esscher", cfg.warnings);
    e.get("lambda", cfg.esscher.lambda);
    e.get("domain_margin", cfg.esscher.domain_margin);
    if (e.has("coupling")) {
      std::string c;
      e.get("coupling", c);
      if (c == "common") cfg.esscher.coupling = DrawCoupling::common;
      else if (c == "independent") cfg.esscher.coupling = DrawCoupling::independent;
      else throw ConfigError("esscher.coupling", "expected common or independent");
    }
    e.finish();
  }
  r.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace varcvar
