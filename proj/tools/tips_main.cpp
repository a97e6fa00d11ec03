// Command-line front end: estimate | sweep | gimh | smc | simulate |
// validate-potential, each driven by one JSON config file. Every output
// carries a provenance block sufficient to reproduce it byte for byte.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tips/config.hpp"
#include "tips/ctmc.hpp"
#include "tips/errors.hpp"
#include "tips/estimator.hpp"
#include "tips/exact.hpp"
#include "tips/experiments.hpp"
#include "tips/finite_model.hpp"
#include "tips/gimh.hpp"
#include "tips/potential.hpp"
#include "tips/rna_model.hpp"
#include "tips/smc.hpp"
#include "tips/stats.hpp"
#include "tips/string_model.hpp"
#include "tips/text_io.hpp"
#include "tips/version.hpp"

namespace {

using nlohmann::ordered_json;
using namespace tips;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> particles;
  std::optional<int> workers;
  std::optional<long> iterations;
  std::optional<std::string> method;
  std::optional<std::string> output;
};

// Output slot each command writes its primary artifact to.
const char* primary_output_key(const std::string& command) {
  if (command == "sweep") return "csv";
  if (command == "gimh") return "chain";
  if (command == "simulate") return "dataset";
  if (command == "validate-potential") return "report";
  return "result";
}

void set_default(ordered_json& obj, const std::string& key,
                 const ordered_json& value) {
  if (!obj.contains(key)) obj[key] = value;
}

// Fills every default the command consults into the document, so the
// provenance block records the complete effective configuration and a
// rerun from it cannot be steered by changed defaults.
void materialize_defaults(ordered_json& doc, const std::string& command) {
  if (!doc.contains("execution")) doc["execution"] = ordered_json::object();
  auto& exec = doc["execution"];
  set_default(exec, "seed", 1);
  set_default(exec, "workers", default_workers());
  set_default(exec, "record_timing", false);
  if (command == "sweep") set_default(exec, "replicates", 1);

  const bool uses_estimator =
      command == "estimate" || command == "sweep" || command == "smc" ||
      command == "gimh" || command == "validate-potential";
  if (uses_estimator) {
    if (!doc.contains("estimator")) doc["estimator"] = ordered_json::object();
    auto& est = doc["estimator"];
    set_default(est, "alpha", 2.0 / 3.0);
    set_default(est, "beta", 0.5);
    set_default(est, "step_cap", 1'000'000);
    if (command == "estimate") {
      set_default(est, "method", "tips");
      set_default(est, "particles", 1000);
      set_default(est, "use_schedule", false);
      set_default(est, "enumeration_bound", 2000);
    }
    if (command == "sweep") {
      set_default(est, "methods", ordered_json::array({"tips", "fs"}));
      set_default(est, "particle_grid", ordered_json::array({1000}));
      set_default(est, "oracle", "auto");
      set_default(est, "use_schedule", false);
      set_default(est, "enumeration_bound", 2000);
    }
    if (command == "smc") {
      set_default(est, "particles", 100);
      set_default(est, "ess_threshold", 0.5);
    }
    if (command == "gimh") set_default(est, "particles", 64);
    if (command == "validate-potential")
      set_default(est, "enumeration_bound", 2000);
  }
  if (command == "gimh") {
    auto& g = doc["gimh"];
    set_default(g, "proposal_scale", 2.0 * std::log(1.2));
    set_default(g, "init_retries", 10);
    const std::size_t dim = g.at("init").size();
    set_default(g, "prior_rates",
                ordered_json::array_t(dim, ordered_json(1.0)));
    if (g.at("family").get<std::string>() == "string-point-indel")
      set_default(g, "theta_sub", 1.0);
  }
  if (command == "simulate") {
    auto& s = doc["simulate"];
    set_default(s, "stationary_start", false);
    if (!doc.contains("estimator")) doc["estimator"] = ordered_json::object();
    set_default(doc["estimator"], "step_cap", 1'000'000);
    set_default(doc["estimator"], "enumeration_bound", 2000);
  }
}

RunConfig effective_config(const std::string& path, const std::string& command,
                           const Overrides& ov) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(read_text_file(path));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (ov.seed || ov.workers) {
    if (!doc.contains("execution")) doc["execution"] = ordered_json::object();
    if (ov.seed) doc["execution"]["seed"] = *ov.seed;
    if (ov.workers) doc["execution"]["workers"] = *ov.workers;
  }
  if (ov.particles || ov.method) {
    if (!doc.contains("estimator")) doc["estimator"] = ordered_json::object();
    if (ov.particles) doc["estimator"]["particles"] = *ov.particles;
    if (ov.method) doc["estimator"]["method"] = *ov.method;
  }
  if (ov.iterations && doc.contains("gimh"))
    doc["gimh"]["iterations"] = *ov.iterations;
  if (ov.output) {
    if (!doc.contains("output")) doc["output"] = ordered_json::object();
    doc["output"][primary_output_key(command)] = *ov.output;
  }
  // Validate first so diagnostics refer to what the user wrote, then bake
  // in defaults and re-validate the effective document.
  parse_config(doc.dump(), command);
  materialize_defaults(doc, command);
  return parse_config(doc.dump(), command);
}

void emit(const RunConfig& cfg, const std::string& command,
          const std::string& content) {
  const char* key = primary_output_key(command);
  if (cfg.has("output", key)) {
    write_text_file(cfg.section("output").at(key).get<std::string>(), content);
  } else {
    std::cout << content;
  }
}

void emit_secondary(const RunConfig& cfg, const std::string& key,
                    const std::string& content) {
  if (cfg.has("output", key))
    write_text_file(cfg.section("output").at(key).get<std::string>(), content);
}

std::string dump_json(const ordered_json& doc) { return doc.dump(2) + "\n"; }

// --- model-generic plumbing -------------------------------------------

template <typename S>
struct QueryStates {
  S start;
  std::vector<S> targets;
};

int parse_finite_state(const FiniteModel& model, const std::string& name) {
  try {
    return model.index_of(name);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config: unknown state name " + name);
  }
}

std::vector<std::string> target_names(const ordered_json& query) {
  const auto& t = query.at("target");
  std::vector<std::string> names;
  if (t.is_string()) {
    names.push_back(t.get<std::string>());
  } else if (t.is_array() && !t.empty()) {
    for (const auto& s : t) {
      if (!s.is_string())
        throw ConfigError("config: query.target entries must be strings");
      names.push_back(s.get<std::string>());
    }
  } else {
    throw ConfigError("config: query.target must be a state or state array");
  }
  return names;
}

// The natural guidance potential for each model family: hop distance for
// finite chains, edit distance for strings, base-pair set distance for
// folding states.
TargetPotential<int> model_potential(const FiniteModel& model,
                                     std::vector<int> targets) {
  return graph_distance_potential(model, std::move(targets));
}

TargetPotential<std::string> model_potential(const StringModel&,
                                             std::vector<std::string> targets) {
  return set_potential<std::string>(
      [](const std::string& x, const std::string& y) {
        return levenshtein_distance(x, y);
      },
      std::move(targets));
}

TargetPotential<std::string> model_potential(const RnaModel&,
                                             std::vector<std::string> targets) {
  return set_potential<std::string>(
      [](const std::string& x, const std::string& y) {
        return pair_set_distance(x, y);
      },
      std::move(targets));
}

QueryStates<int> parse_query_states(const FiniteModel& model,
                                    const ordered_json& query) {
  QueryStates<int> out;
  out.start = parse_finite_state(model, query.at("start").get<std::string>());
  for (const auto& name : target_names(query))
    out.targets.push_back(parse_finite_state(model, name));
  return out;
}

template <typename M>
QueryStates<std::string> parse_query_states(const M& model,
                                            const ordered_json& query) {
  QueryStates<std::string> out;
  out.start = query.at("start").get<std::string>();
  out.targets = target_names(query);
  // Surface bad states as config errors rather than runtime failures.
  try {
    model.rate(out.start);
    for (const auto& t : out.targets) model.rate(t);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: query state rejected: ") + e.what());
  }
  return out;
}

ProposalConfig proposal_from(const RunConfig& cfg, double horizon) {
  const auto& est = cfg.section("estimator");
  ProposalConfig p;
  p.alpha = est.at("alpha").get<double>();
  p.beta = est.at("beta").get<double>();
  p.step_cap = est.at("step_cap").get<long>();
  if (est.contains("use_schedule") && est.at("use_schedule").get<bool>()) {
    const auto tuned = rna_tuning_schedule(horizon);
    p.alpha = tuned.first;
    p.beta = tuned.second;
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: estimator: ") + e.what());
  }
  return p;
}

// Exact endpoint probability through state enumeration and the matrix
// exponential; empty optional when the space cannot be closed under the
// bound or misses a query state.
template <typename M>
std::optional<double> oracle_probability(
    const M& model, const QueryStates<typename M::state_type>& q,
    double horizon, long bound, std::string* why = nullptr) {
  const auto space = enumerate_reachable(model, q.start, bound);
  if (!space.closed) {
    if (why)
      *why = "state space exceeded the enumeration bound of " +
             std::to_string(bound);
    return std::nullopt;
  }
  double total = 0.0;
  const auto matrix = transition_matrix(space, horizon);
  const long i = space.find(q.start);
  for (const auto& t : q.targets) {
    const long j = space.find(t);
    if (j < 0) {
      if (why) *why = "target state unreachable from the start state";
      return std::nullopt;
    }
    total += matrix(i, j);
  }
  return std::min(1.0, std::max(0.0, total));
}

// --- estimate ----------------------------------------------------------

template <typename M>
ordered_json estimate_with_model(const M& model, const RunConfig& cfg) {
  const auto& query = cfg.section("query");
  const auto& est = cfg.section("estimator");
  const auto q = parse_query_states(model, query);
  const double horizon = query.at("horizon").get<double>();
  const std::string method = est.at("method").get<std::string>();
  const std::uint64_t seed = cfg.seed();

  ordered_json result;
  result["provenance"] = provenance_block("estimate", seed, cfg.raw);
  if (method == "exact") {
    std::string why;
    const auto exact =
        oracle_probability(model, q, horizon,
                           est.at("enumeration_bound").get<long>(), &why);
    if (!exact)
      throw OracleUnavailableError("estimate: exact method unavailable: " +
                                   why);
    result["estimate"] = *exact;
    result["log_estimate"] = std::log(*exact);
    result["ess"] = nullptr;
    result["weight_variance"] = nullptr;
    result["particles"] = 0;
    result["cpu_ms"] = 0.0;
  } else {
    EstimateSummary summary;
    const auto pot = model_potential(model, q.targets);
    if (method == "tips") {
      TipsOptions options;
      options.proposal = proposal_from(cfg, horizon);
      options.particles = est.at("particles").get<long>();
      options.workers = cfg.workers();
      options.keep_log_weights = false;
      summary = tips_estimate(model, pot, q.start, horizon, options, seed);
    } else {
      if (q.targets.size() != 1)
        throw ConfigError(
            "config: query.target must be a single state for method fs");
      summary = forward_sampling_estimate(model, q.start, q.targets.front(),
                                          horizon, est.at("particles").get<long>(),
                                          seed, cfg.workers(),
                                          est.at("step_cap").get<long>());
    }
    result["estimate"] = summary.estimate;
    result["log_estimate"] = summary.log_estimate;
    result["ess"] = summary.ess;
    result["weight_variance"] = summary.weight_variance;
    result["particles"] = summary.particles;
    result["degenerate"] = summary.degenerate;
    result["cpu_ms"] = cfg.record_timing() ? summary.wall_clock_ms : 0.0;
  }
  result["seed"] = seed;
  return result;
}

int cmd_estimate(const RunConfig& cfg) {
  const auto result = std::visit(
      [&](const auto& model) { return estimate_with_model(model, cfg); },
      build_model(cfg.section("model")));
  emit(cfg, "estimate", dump_json(result));
  return 0;
}

// --- sweep -------------------------------------------------------------

template <typename M>
std::vector<SweepRecord> sweep_with_model(const M& model,
                                          const RunConfig& cfg) {
  const auto& query = cfg.section("query");
  const auto& est = cfg.section("estimator");
  const auto q = parse_query_states(model, query);
  const auto pot = model_potential(model, q.targets);

  SweepPlan plan;
  for (const auto& m : est.at("methods"))
    plan.methods.push_back(m.get<std::string>());
  for (const auto& h : query.at("horizons"))
    plan.horizons.push_back(h.get<double>());
  for (const auto& k : est.at("particle_grid"))
    plan.particle_grid.push_back(k.get<long>());
  plan.replicates = cfg.replicates();
  plan.master_seed = cfg.seed();
  plan.workers = cfg.workers();
  plan.step_cap = est.at("step_cap").get<long>();
  plan.record_timing = cfg.record_timing();
  plan.schedule = [&cfg](double horizon) {
    return proposal_from(cfg, horizon);
  };

  const std::string oracle = est.at("oracle").get<std::string>();
  if (oracle != "off") {
    std::string why;
    // Probe availability once; per-horizon values are computed on demand.
    const auto probe =
        oracle_probability(model, q, plan.horizons.front(),
                           est.at("enumeration_bound").get<long>(), &why);
    if (probe) {
      const long bound = est.at("enumeration_bound").get<long>();
      plan.exact_probability = [&model, q, bound](double horizon) {
        return oracle_probability(model, q, horizon, bound).value();
      };
    } else if (oracle == "required") {
      throw OracleUnavailableError("sweep: exact reference unavailable: " +
                                   why);
    }
  }
  return estimate_comparison_sweep(model, pot, q.start, plan);
}

int cmd_sweep(const RunConfig& cfg) {
  const auto rows = std::visit(
      [&](const auto& model) { return sweep_with_model(model, cfg); },
      build_model(cfg.section("model")));
  bool any_ok = false;
  for (const auto& row : rows)
    if (row.status.rfind("error", 0) != 0) any_ok = true;
  if (!any_ok) throw std::runtime_error("sweep: every cell failed");
  emit(cfg, "sweep",
       sweep_csv(rows, provenance_block("sweep", cfg.seed(), cfg.raw)));
  return 0;
}

// --- gimh --------------------------------------------------------------

int cmd_gimh(const RunConfig& cfg) {
  const auto& g = cfg.section("gimh");
  const std::string family = g.at("family").get<std::string>();
  const long iterations = g.at("iterations").get<long>();
  const std::uint64_t seed = cfg.seed();
  const auto provenance = provenance_block("gimh", seed, cfg.raw);

  std::vector<EndpointRecord> data;
  try {
    data = dataset_from_json(
        ordered_json::parse(read_text_file(g.at("dataset").get<std::string>())));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: gimh.dataset: ") + e.what());
  }

  FamilyOptions family_options;
  family_options.proposal = proposal_from(cfg, 0.0);
  family_options.particles = cfg.section("estimator").at("particles").get<long>();
  family_options.workers = cfg.workers();
  FamilyMarginal marginal;
  if (family == "two-state-flip")
    marginal = two_state_flip_marginal(std::move(data), family_options);
  else
    marginal = string_point_indel_marginal(
        std::move(data), g.at("theta_sub").get<double>(), family_options);

  std::vector<double> init;
  for (const auto& v : g.at("init")) init.push_back(v.get<double>());
  if (init.size() != marginal.parameter_names.size())
    throw ConfigError("config: gimh.init needs " +
                      std::to_string(marginal.parameter_names.size()) +
                      " components for family " + family);
  ExponentialPrior prior;
  for (const auto& v : g.at("prior_rates")) prior.rates.push_back(v.get<double>());
  if (prior.rates.size() != init.size())
    throw ConfigError("config: gimh.prior_rates must match init in length");

  if (iterations == 0) {
    emit(cfg, "gimh",
         chain_csv(marginal.parameter_names, {}, {}, {}, {}, provenance));
    return 0;
  }

  GimhOptions options;
  options.iterations = iterations;
  options.proposal_scale = g.at("proposal_scale").get<double>();
  options.init_retries = g.at("init_retries").get<int>();
  const auto samples =
      gimh_chain(std::move(init), prior, marginal.log_marginal, options, seed);

  std::vector<long> iters;
  std::vector<int> accepted;
  std::vector<double> log_z;
  std::vector<std::vector<double>> values(marginal.parameter_names.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    iters.push_back(static_cast<long>(i));
    accepted.push_back(samples[i].accepted ? 1 : 0);
    log_z.push_back(samples[i].log_z);
    for (std::size_t p = 0; p < values.size(); ++p)
      values[p].push_back(samples[i].params[p]);
  }
  emit(cfg, "gimh",
       chain_csv(marginal.parameter_names, iters, accepted, log_z, values,
                 provenance));

  if (cfg.has("output", "diagnostics")) {
    const auto diag = chain_diagnostics(samples);
    ordered_json doc;
    doc["provenance"] = provenance;
    doc["includes_statio"] = marginal.includes_statio;
    doc["acceptance_rate"] = diag.acceptance_rate;
    doc["parameter_ess"] = ordered_json::object();
    for (std::size_t p = 0; p < marginal.parameter_names.size(); ++p)
      doc["parameter_ess"][marginal.parameter_names[p]] =
          diag.parameter_ess[p];
    doc["quantile_levels"] = {0.025, 0.25, 0.5, 0.75, 0.975};
    doc["prefix_lengths"] = diag.prefix_lengths;
    doc["prefix_quantiles"] = ordered_json::object();
    for (std::size_t p = 0; p < marginal.parameter_names.size(); ++p) {
      auto& rows = doc["prefix_quantiles"][marginal.parameter_names[p]];
      rows = ordered_json::array();
      for (const auto& point : diag.prefix_quantiles) {
        ordered_json row = ordered_json::array();
        for (double v : point[p]) row.push_back(v);
        rows.push_back(std::move(row));
      }
    }
    emit_secondary(cfg, "diagnostics", dump_json(doc));
  }
  return 0;
}

// --- smc ---------------------------------------------------------------

template <typename M>
ordered_json smc_with_model(const M& model, const RunConfig& cfg) {
  using S = typename M::state_type;
  const auto& query = cfg.section("query");
  const auto& est = cfg.section("estimator");

  // Start state rides through the singleton-target parser.
  ordered_json fake_query;
  fake_query["start"] = query.at("start");
  fake_query["target"] = query.at("start");
  const auto q = parse_query_states(model, fake_query);

  std::vector<Observation<S>> observations;
  for (const auto& obs : query.at("observations")) {
    Observation<S> o;
    o.horizon = obs.at("horizon").get<double>();
    ordered_json set_query;
    set_query["start"] = query.at("start");
    set_query["target"] = obs.at("set");
    o.candidates = parse_query_states(model, set_query).targets;
    observations.push_back(std::move(o));
  }

  SmcOptions options;
  options.proposal = proposal_from(cfg, observations.front().horizon);
  options.particles = est.at("particles").get<long>();
  options.ess_threshold = est.at("ess_threshold").get<double>();
  options.workers = cfg.workers();
  const auto pot = model_potential(model, std::vector<S>{q.start});
  const auto result = smc_run(model, pot.distance(), options, q.start,
                              observations, cfg.seed());

  ordered_json doc;
  doc["provenance"] = provenance_block("smc", cfg.seed(), cfg.raw);
  doc["log_marginal"] = result.log_marginal;
  doc["generations"] = ordered_json::array();
  for (const auto& gen : result.history) {
    ordered_json row;
    row["ess"] = gen.ess;
    row["log_mean_increment"] = gen.log_mean_increment;
    row["resampled"] = gen.resampled;
    doc["generations"].push_back(std::move(row));
  }
  doc["particles"] = options.particles;
  doc["seed"] = cfg.seed();
  return doc;
}

int cmd_smc(const RunConfig& cfg) {
  const auto doc = std::visit(
      [&](const auto& model) { return smc_with_model(model, cfg); },
      build_model(cfg.section("model")));
  emit(cfg, "smc", dump_json(doc));
  return 0;
}

// --- simulate ----------------------------------------------------------

std::vector<double> finite_stationary(const FiniteModel& model) {
  const Eigen::MatrixXd q = model.generator();
  const long n = q.rows();
  Eigen::MatrixXd a = q.transpose();
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  const Eigen::VectorXd pi = a.fullPivLu().solve(b);
  std::vector<double> out(static_cast<std::size_t>(n));
  double total = 0.0;
  for (long i = 0; i < n; ++i) {
    if (pi(i) < -1e-9)
      throw std::runtime_error(
          "simulate: no stationary distribution found for this chain");
    out[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
    total += out[static_cast<std::size_t>(i)];
  }
  if (!(total > 0.0))
    throw std::runtime_error(
        "simulate: no stationary distribution found for this chain");
  for (auto& v : out) v /= total;
  return out;
}

template <typename S>
S sample_from_masses(const std::vector<S>& values,
                     const std::vector<double>& masses, RngStream& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    cumulative += masses[i];
    if (u < cumulative) return values[i];
  }
  return values.back();
}

int cmd_simulate(const RunConfig& cfg) {
  const auto& sim = cfg.section("simulate");
  const long records = sim.at("records").get<long>();
  const double horizon = sim.at("horizon").get<double>();
  const bool stationary = sim.at("stationary_start").get<bool>();
  const long step_cap = cfg.section("estimator").at("step_cap").get<long>();
  const std::uint64_t seed = cfg.seed();

  const auto run = [&](const auto& model,
                       auto draw_start) -> std::vector<EndpointRecord> {
    std::vector<EndpointRecord> out;
    out.reserve(static_cast<std::size_t>(records));
    for (long i = 0; i < records; ++i) {
      RngStream rng(seed, static_cast<std::uint64_t>(i));
      const auto start = draw_start(rng);
      const auto traj = forward_simulate(model, start, horizon, rng, step_cap);
      out.push_back({model.render(start), model.render(traj.path.states.back()),
                     horizon});
    }
    return out;
  };

  const auto model_variant = build_model(cfg.section("model"));
  std::vector<EndpointRecord> dataset;
  if (const auto* finite = std::get_if<FiniteModel>(&model_variant)) {
    if (stationary) {
      const auto pi = finite_stationary(*finite);
      std::vector<int> states;
      for (std::size_t i = 0; i < pi.size(); ++i)
        states.push_back(static_cast<int>(i));
      dataset = run(*finite, [&](RngStream& rng) {
        return sample_from_masses(states, pi, rng);
      });
    } else {
      const int start =
          parse_finite_state(*finite, sim.at("start").get<std::string>());
      dataset = run(*finite, [&](RngStream&) { return start; });
    }
  } else if (const auto* strings = std::get_if<StringModel>(&model_variant)) {
    if (stationary) {
      if (!strings->has_stationary())
        throw ConfigError(
            "config: simulate.stationary_start needs mu_pt > 0 and no "
            "slipped-strand motion");
      const auto& params = strings->params();
      static constexpr char kAlphabet[] = {'A', 'C', 'G', 'T'};
      dataset = run(*strings, [&](RngStream& rng) {
        const long length = rng.poisson(params.lambda_pt / params.mu_pt);
        std::string s;
        for (long j = 0; j < length; ++j)
          s.push_back(kAlphabet[rng.uniform_index(4)]);
        return s;
      });
    } else {
      const std::string start = sim.at("start").get<std::string>();
      strings->rate(start);
      dataset = run(*strings, [&](RngStream&) { return start; });
    }
  } else {
    const auto& rna = std::get<RnaModel>(model_variant);
    if (stationary) {
      const auto space = enumerate_reachable(
          rna, std::string(rna.sequence().size(), '.'),
          cfg.section("estimator").at("enumeration_bound").get<long>());
      if (!space.closed)
        throw ConfigError(
            "config: simulate.stationary_start needs the folding space to fit "
            "the enumeration bound");
      std::vector<double> masses;
      double total = 0.0;
      for (const auto& s : space.states) {
        masses.push_back(std::exp(-2.0 * rna.energy(s) /
                                  rna.params().kt_scale));
        total += masses.back();
      }
      for (auto& m : masses) m /= total;
      dataset = run(rna, [&](RngStream& rng) {
        return sample_from_masses(space.states, masses, rng);
      });
    } else {
      const std::string start = sim.at("start").get<std::string>();
      rna.rate(start);
      dataset = run(rna, [&](RngStream&) { return start; });
    }
  }

  ordered_json doc;
  doc["provenance"] = provenance_block("simulate", seed, cfg.raw);
  doc["records"] = dataset_to_json(dataset).at("records");
  emit(cfg, "simulate", dump_json(doc));
  return 0;
}

// --- validate-potential --------------------------------------------------

template <typename M>
ordered_json validate_with_model(const M& model, const RunConfig& cfg) {
  using S = typename M::state_type;
  const auto& query = cfg.section("query");
  ordered_json start_query;
  start_query["start"] = query.contains("start") ? query.at("start")
                                                 : query.at("target").is_array()
                                                       ? query.at("target").at(0)
                                                       : query.at("target");
  start_query["target"] = query.at("target");
  const auto q = parse_query_states(model, start_query);
  const auto pot = model_potential(model, q.targets);

  std::vector<S> states;
  bool exhaustive = true;
  if constexpr (std::is_same_v<M, FiniteModel>) {
    for (int i = 0; i < static_cast<int>(model.size()); ++i)
      states.push_back(i);
  } else {
    const long bound =
        cfg.section("estimator").at("enumeration_bound").get<long>();
    const auto space = enumerate_reachable(model, q.start, bound);
    states = space.states;
    exhaustive = space.closed;
  }
  const auto report = validate_potential(model, pot, states);

  ordered_json doc;
  doc["provenance"] = provenance_block("validate-potential", cfg.seed(),
                                       cfg.raw);
  doc["states_checked"] = report.states_checked;
  doc["exhaustive"] = exhaustive;
  doc["zero_exactly_on_targets"] = report.zero_exactly_on_targets;
  doc["decreasing_step_everywhere"] = report.decreasing_step_everywhere;
  doc["unit_steps"] = report.unit_steps;
  doc["observed_deltas"] = report.observed_deltas;
  doc["valid"] = report.valid();
  doc["violation_count"] = report.violation_count;
  doc["warning_count"] = report.warning_count;
  doc["violations"] = ordered_json::array();
  for (const auto& note : report.violations)
    doc["violations"].push_back({{"state", note.state}, {"detail", note.detail}});
  doc["warnings"] = ordered_json::array();
  for (const auto& note : report.warnings)
    doc["warnings"].push_back({{"state", note.state}, {"detail", note.detail}});
  return doc;
}

int cmd_validate_potential(const RunConfig& cfg) {
  const auto doc = std::visit(
      [&](const auto& model) { return validate_with_model(model, cfg); },
      build_model(cfg.section("model")));
  emit(cfg, "validate-potential", dump_json(doc));
  return 0;
}

int dispatch(const std::string& command, const std::string& config_path,
             const Overrides& ov) {
  try {
    const RunConfig cfg = effective_config(config_path, command, ov);
    if (command == "estimate") return cmd_estimate(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    if (command == "gimh") return cmd_gimh(cfg);
    if (command == "smc") return cmd_smc(cfg);
    if (command == "simulate") return cmd_simulate(cfg);
    return cmd_validate_potential(cfg);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const OracleUnavailableError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Endpoint-conditioned transition probabilities for "
               "continuous-time Markov chains"};
  app.set_version_flag("--version", std::string(tips::kVersion));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"estimate", "Estimate one endpoint-conditioned probability"},
      {"sweep", "Compare estimators over a horizon/particle grid"},
      {"gimh", "Pseudo-marginal posterior sampling over model parameters"},
      {"smc", "Marginal likelihood of a set-valued observation sequence"},
      {"simulate", "Draw endpoint datasets by forward simulation"},
      {"validate-potential", "Check a guidance potential's conditions"},
  };

  std::string config_path;
  Overrides ov;
  std::uint64_t seed_flag = 0;
  long particles_flag = 0;
  int workers_flag = 0;
  long iterations_flag = 0;
  std::string method_flag;
  std::string output_flag;

  for (const auto& [name, description] : commands) {
    auto* sub = app.add_subcommand(name, description);
    sub->add_option("config", config_path, "JSON run configuration")
        ->required();
    sub->add_option("--seed", seed_flag, "Override execution.seed");
    sub->add_option("--particles", particles_flag,
                    "Override estimator.particles");
    sub->add_option("--workers", workers_flag, "Override execution.workers");
    sub->add_option("--output", output_flag,
                    "Override the command's primary output path");
    if (name == "estimate")
      sub->add_option("--method", method_flag, "Override estimator.method");
    if (name == "gimh")
      sub->add_option("--iterations", iterations_flag,
                      "Override gimh.iterations");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const auto* sub = app.get_subcommands().front();
  const auto given = [&sub](const char* name) {
    const auto* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--seed")) ov.seed = seed_flag;
  if (given("--particles")) ov.particles = particles_flag;
  if (given("--workers")) ov.workers = workers_flag;
  if (given("--output")) ov.output = output_flag;
  if (given("--method")) ov.method = method_flag;
  if (given("--iterations")) ov.iterations = iterations_flag;
  return dispatch(sub->get_name(), config_path, ov);
}
