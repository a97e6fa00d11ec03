#include "tips/config.hpp"

#include <cmath>
#include <set>

#include "tips/errors.hpp"
#include "tips/parallel.hpp"
#include "tips/text_io.hpp"

namespace tips {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

void require_object(const ordered_json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
}

void check_keys(const ordered_json& obj, const std::string& path,
                const std::set<std::string>& allowed,
                const std::set<std::string>& required) {
  require_object(obj, path);
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) fail(path + "." + key, "unknown key");
  for (const auto& key : required)
    if (!obj.contains(key)) fail(path + "." + key, "missing required key");
}

double get_number(const ordered_json& obj, const std::string& key,
                  const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const auto& v = obj.at(key);
  if (!v.is_number()) fail(path + "." + key, "expected a number");
  return v.get<double>();
}

double get_number_or(const ordered_json& obj, const std::string& key,
                     const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_number(obj, key, path);
}

long get_integer(const ordered_json& obj, const std::string& key,
                 const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) fail(path + "." + key, "expected an integer");
  return v.get<long>();
}

std::string get_string(const ordered_json& obj, const std::string& key,
                       const std::string& path) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  const auto& v = obj.at(key);
  if (!v.is_string()) fail(path + "." + key, "expected a string");
  return v.get<std::string>();
}

void check_positive(double v, const std::string& path) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(path, "must be finite and > 0");
}

void check_nonnegative(double v, const std::string& path) {
  if (!(v >= 0.0) || !std::isfinite(v)) fail(path, "must be finite and >= 0");
}

void validate_model_section(const ordered_json& m) {
  const std::string path = "model";
  if (!m.is_object()) fail(path, "expected an object");
  const std::string kind =
      m.contains("kind") && m.at("kind").is_string()
          ? m.at("kind").get<std::string>()
          : (fail(path + ".kind", "missing or non-string"), "");
  if (kind == "finite") {
    check_keys(m, path, {"kind", "states", "rates", "transitions"},
               {"kind", "states", "rates", "transitions"});
    if (!m.at("states").is_array() || m.at("states").empty())
      fail(path + ".states", "expected a non-empty array of names");
    if (!m.at("rates").is_array()) fail(path + ".rates", "expected an array");
    if (!m.at("transitions").is_array())
      fail(path + ".transitions", "expected an array");
    for (const auto& t : m.at("transitions"))
      check_keys(t, path + ".transitions[]", {"from", "to", "prob"},
                 {"from", "to", "prob"});
  } else if (kind == "string") {
    check_keys(m, path,
               {"kind", "theta_sub", "lambda_pt", "mu_pt", "lambda_ssm",
                "mu_ssm", "ssm_max_len"},
               {"kind", "theta_sub", "lambda_pt", "mu_pt", "lambda_ssm",
                "mu_ssm"});
    for (const char* key :
         {"theta_sub", "lambda_pt", "mu_pt", "lambda_ssm", "mu_ssm"})
      check_nonnegative(get_number(m, key, path), path + "." + key);
  } else if (kind == "rna") {
    check_keys(m, path,
               {"kind", "sequence", "energy_per_pair", "kt_scale",
                "hairpin_min", "kawasaki_halved", "subset"},
               {"kind", "sequence"});
    const std::string seq = get_string(m, "sequence", path);
    for (char c : seq)
      if (c != 'A' && c != 'C' && c != 'G' && c != 'U')
        fail(path + ".sequence", "must be over the ACGU alphabet");
    check_positive(get_number_or(m, "energy_per_pair", path, 1.0),
                   path + ".energy_per_pair");
    check_positive(get_number_or(m, "kt_scale", path, 1.0), path + ".kt_scale");
    if (m.contains("subset") && !m.at("subset").is_array())
      fail(path + ".subset", "expected an array of dot-bracket strings");
  } else {
    fail(path + ".kind", "must be one of finite | string | rna");
  }
}

void validate_execution(const ordered_json& cfg) {
  if (!cfg.contains("execution")) return;
  const auto& e = cfg.at("execution");
  check_keys(e, "execution", {"seed", "workers", "record_timing", "replicates"},
             {});
  if (e.contains("seed") &&
      (!e.at("seed").is_number_integer() || e.at("seed").get<long long>() < 0))
    fail("execution.seed", "expected a non-negative integer");
  if (e.contains("workers")) {
    const long w = get_integer(e, "workers", "execution");
    if (w < 1 || w > 64) fail("execution.workers", "must lie in [1, 64]");
  }
  if (e.contains("record_timing") && !e.at("record_timing").is_boolean())
    fail("execution.record_timing", "expected a boolean");
  if (e.contains("replicates") && get_integer(e, "replicates", "execution") < 1)
    fail("execution.replicates", "must be >= 1");
}

void validate_estimator(const ordered_json& cfg, const std::string& command) {
  if (!cfg.contains("estimator")) {
    if (command == "estimate" || command == "sweep" || command == "smc")
      fail("estimator", "missing required section");
    return;
  }
  const auto& e = cfg.at("estimator");
  check_keys(e, "estimator",
             {"method", "particles", "alpha", "beta", "step_cap",
              "particle_grid", "methods", "oracle", "use_schedule",
              "ess_threshold", "enumeration_bound"},
             {});
  if (e.contains("method")) {
    const std::string m = get_string(e, "method", "estimator");
    if (m != "tips" && m != "fs" && m != "exact")
      fail("estimator.method", "must be one of tips | fs | exact");
  }
  if (e.contains("particles")) {
    if (get_integer(e, "particles", "estimator") < 1)
      fail("estimator.particles", "must be >= 1");
  }
  if (e.contains("alpha")) {
    const double a = get_number(e, "alpha", "estimator");
    if (!(a > 0.5) || !(a < 1.0)) fail("estimator.alpha", "must lie in (1/2, 1)");
  }
  if (e.contains("beta")) {
    const double b = get_number(e, "beta", "estimator");
    if (!(b > 0.0) || b > 1.0) fail("estimator.beta", "must lie in (0, 1]");
  }
  if (e.contains("step_cap") && get_integer(e, "step_cap", "estimator") < 1)
    fail("estimator.step_cap", "must be >= 1");
  if (e.contains("particle_grid")) {
    if (!e.at("particle_grid").is_array() || e.at("particle_grid").empty())
      fail("estimator.particle_grid", "expected a non-empty integer array");
    for (const auto& k : e.at("particle_grid"))
      if (!k.is_number_integer() || k.get<long>() < 1)
        fail("estimator.particle_grid", "entries must be integers >= 1");
  }
  if (e.contains("methods")) {
    if (!e.at("methods").is_array() || e.at("methods").empty())
      fail("estimator.methods", "expected a non-empty array");
    for (const auto& m : e.at("methods")) {
      if (!m.is_string()) fail("estimator.methods", "entries must be strings");
      const std::string s = m.get<std::string>();
      if (s != "tips" && s != "fs")
        fail("estimator.methods", "entries must be tips | fs");
    }
  }
  if (e.contains("oracle")) {
    const std::string o = get_string(e, "oracle", "estimator");
    if (o != "auto" && o != "required" && o != "off")
      fail("estimator.oracle", "must be one of auto | required | off");
  }
  if (e.contains("use_schedule") && !e.at("use_schedule").is_boolean())
    fail("estimator.use_schedule", "expected a boolean");
  if (e.contains("ess_threshold")) {
    const double t = get_number(e, "ess_threshold", "estimator");
    if (!(t > 0.0) || t > 1.0) fail("estimator.ess_threshold", "must lie in (0, 1]");
  }
  if (e.contains("enumeration_bound") &&
      get_integer(e, "enumeration_bound", "estimator") < 1)
    fail("estimator.enumeration_bound", "must be >= 1");
}

void validate_query(const ordered_json& cfg, const std::string& command) {
  const bool need_query = command == "estimate" || command == "sweep" ||
                          command == "smc" || command == "validate-potential";
  if (!cfg.contains("query")) {
    if (need_query) fail("query", "missing required section");
    return;
  }
  const auto& q = cfg.at("query");
  check_keys(q, "query",
             {"start", "target", "horizon", "horizons", "observations"}, {});
  if (command == "estimate") {
    for (const char* key : {"start", "target"})
      if (!q.contains(key)) fail(std::string("query.") + key, "missing required key");
    const double h = get_number(q, "horizon", "query");
    check_nonnegative(h, "query.horizon");
  }
  if (command == "sweep") {
    for (const char* key : {"start", "target"})
      if (!q.contains(key)) fail(std::string("query.") + key, "missing required key");
    if (!q.contains("horizons") || !q.at("horizons").is_array() ||
        q.at("horizons").empty())
      fail("query.horizons", "expected a non-empty array");
    for (const auto& h : q.at("horizons")) {
      if (!h.is_number()) fail("query.horizons", "entries must be numbers");
      check_nonnegative(h.get<double>(), "query.horizons");
    }
  }
  if (command == "smc") {
    if (!q.contains("start")) fail("query.start", "missing required key");
    if (!q.contains("observations") || !q.at("observations").is_array() ||
        q.at("observations").empty())
      fail("query.observations", "expected a non-empty array");
    for (const auto& o : q.at("observations")) {
      check_keys(o, "query.observations[]", {"set", "horizon"},
                 {"set", "horizon"});
      if (!o.at("set").is_array() || o.at("set").empty())
        fail("query.observations[].set", "expected a non-empty array");
      const double h = get_number(o, "horizon", "query.observations[]");
      check_positive(h, "query.observations[].horizon");
    }
  }
  if (command == "validate-potential" && !q.contains("target"))
    fail("query.target", "missing required key");
}

void validate_gimh(const ordered_json& cfg, const std::string& command) {
  if (command != "gimh") {
    if (cfg.contains("gimh")) fail("gimh", "section not used by this command");
    return;
  }
  if (!cfg.contains("gimh")) fail("gimh", "missing required section");
  const auto& g = cfg.at("gimh");
  check_keys(g, "gimh",
             {"family", "dataset", "iterations", "proposal_scale",
              "prior_rates", "init", "theta_sub", "init_retries"},
             {"family", "dataset", "iterations", "init"});
  const std::string family = get_string(g, "family", "gimh");
  if (family != "two-state-flip" && family != "string-point-indel")
    fail("gimh.family", "must be two-state-flip | string-point-indel");
  if (!g.at("dataset").is_string()) fail("gimh.dataset", "expected a path string");
  if (get_integer(g, "iterations", "gimh") < 0)
    fail("gimh.iterations", "must be >= 0");
  if (!g.at("init").is_array() || g.at("init").empty())
    fail("gimh.init", "expected a non-empty number array");
  for (const auto& v : g.at("init")) {
    if (!v.is_number()) fail("gimh.init", "entries must be numbers");
    check_positive(v.get<double>(), "gimh.init");
  }
  if (g.contains("prior_rates")) {
    if (!g.at("prior_rates").is_array() || g.at("prior_rates").empty())
      fail("gimh.prior_rates", "expected a non-empty number array");
    for (const auto& v : g.at("prior_rates")) {
      if (!v.is_number()) fail("gimh.prior_rates", "entries must be numbers");
      check_positive(v.get<double>(), "gimh.prior_rates");
    }
  }
  if (g.contains("proposal_scale"))
    check_positive(get_number(g, "proposal_scale", "gimh"),
                   "gimh.proposal_scale");
  if (g.contains("init_retries") && get_integer(g, "init_retries", "gimh") < 1)
    fail("gimh.init_retries", "must be >= 1");
  if (g.contains("theta_sub"))
    check_nonnegative(get_number(g, "theta_sub", "gimh"), "gimh.theta_sub");
}

void validate_simulate(const ordered_json& cfg, const std::string& command) {
  if (command != "simulate") {
    if (cfg.contains("simulate")) fail("simulate", "section not used by this command");
    return;
  }
  if (!cfg.contains("simulate")) fail("simulate", "missing required section");
  const auto& s = cfg.at("simulate");
  check_keys(s, "simulate", {"records", "start", "stationary_start", "horizon"},
             {"records", "horizon"});
  if (get_integer(s, "records", "simulate") < 0)
    fail("simulate.records", "must be >= 0");
  check_nonnegative(get_number(s, "horizon", "simulate"), "simulate.horizon");
  const bool stationary = s.contains("stationary_start") &&
                          s.at("stationary_start").is_boolean() &&
                          s.at("stationary_start").get<bool>();
  if (!stationary && !s.contains("start"))
    fail("simulate.start", "missing (or set stationary_start: true)");
}

void validate_output(const ordered_json& cfg) {
  if (!cfg.contains("output")) return;
  check_keys(cfg.at("output"), "output",
             {"result", "csv", "chain", "diagnostics", "dataset", "report"},
             {});
  for (const auto& [key, value] : cfg.at("output").items())
    if (!value.is_string()) fail("output." + key, "expected a path string");
}

}  // namespace

std::uint64_t RunConfig::seed() const {
  if (raw.contains("execution") && raw.at("execution").contains("seed"))
    return raw.at("execution").at("seed").get<std::uint64_t>();
  return 1;
}

int RunConfig::workers() const {
  if (raw.contains("execution") && raw.at("execution").contains("workers"))
    return raw.at("execution").at("workers").get<int>();
  return default_workers();
}

int RunConfig::replicates() const {
  if (raw.contains("execution") && raw.at("execution").contains("replicates"))
    return raw.at("execution").at("replicates").get<int>();
  return 1;
}

bool RunConfig::record_timing() const {
  if (raw.contains("execution") && raw.at("execution").contains("record_timing"))
    return raw.at("execution").at("record_timing").get<bool>();
  return false;
}

const nlohmann::ordered_json& RunConfig::section(const std::string& name) const {
  if (!raw.contains(name)) throw ConfigError("config: missing section " + name);
  return raw.at(name);
}

bool RunConfig::has(const std::string& section, const std::string& key) const {
  return raw.contains(section) && raw.at(section).contains(key);
}

RunConfig parse_config(const std::string& json_text,
                       const std::string& command) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(doc, "$",
             {"model", "query", "estimator", "gimh", "simulate", "execution",
              "output"},
             {"model"});
  validate_model_section(doc.at("model"));
  validate_execution(doc);
  validate_query(doc, command);
  if (command == "estimate" || command == "sweep" || command == "smc")
    validate_estimator(doc, command);
  else if (doc.contains("estimator"))
    validate_estimator(doc, command);
  validate_gimh(doc, command);
  validate_simulate(doc, command);
  validate_output(doc);
  return RunConfig{std::move(doc)};
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, command);
}

ModelVariant build_model(const nlohmann::ordered_json& m) {
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "finite") {
    std::vector<std::string> names;
    for (const auto& s : m.at("states")) names.push_back(s.get<std::string>());
    std::vector<double> rates;
    for (const auto& r : m.at("rates")) rates.push_back(r.get<double>());
    if (rates.size() != names.size())
      throw ConfigError("config: model.rates length must match model.states");
    std::vector<std::vector<Transition<int>>> adj(names.size());
    auto index_of = [&](const std::string& n) -> int {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<int>(i);
      throw ConfigError("config: model.transitions references unknown state " + n);
    };
    for (const auto& t : m.at("transitions")) {
      const int from = index_of(t.at("from").get<std::string>());
      const int to = index_of(t.at("to").get<std::string>());
      adj[static_cast<std::size_t>(from)].push_back(
          {to, t.at("prob").get<double>()});
    }
    try {
      return FiniteModel(std::move(names), std::move(rates), std::move(adj));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  if (kind == "string") {
    StringParams p;
    p.theta_sub = m.at("theta_sub").get<double>();
    p.lambda_pt = m.at("lambda_pt").get<double>();
    p.mu_pt = m.at("mu_pt").get<double>();
    p.lambda_ssm = m.at("lambda_ssm").get<double>();
    p.mu_ssm = m.at("mu_ssm").get<double>();
    if (m.contains("ssm_max_len")) p.ssm_max_len = m.at("ssm_max_len").get<int>();
    try {
      return StringModel(p);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
  }
  RnaParams p;
  if (m.contains("energy_per_pair"))
    p.energy_per_pair = m.at("energy_per_pair").get<double>();
  if (m.contains("kt_scale")) p.kt_scale = m.at("kt_scale").get<double>();
  if (m.contains("hairpin_min")) p.hairpin_min = m.at("hairpin_min").get<int>();
  if (m.contains("kawasaki_halved"))
    p.kawasaki_halved = m.at("kawasaki_halved").get<bool>();
  try {
    if (m.contains("subset")) {
      std::vector<std::string> subset;
      for (const auto& s : m.at("subset")) subset.push_back(s.get<std::string>());
      return RnaModel(m.at("sequence").get<std::string>(), p, std::move(subset));
    }
    return RnaModel(m.at("sequence").get<std::string>(), p);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace tips
