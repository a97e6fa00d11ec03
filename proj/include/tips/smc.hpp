#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "tips/ctmc.hpp"
#include "tips/errors.hpp"
#include "tips/estimator.hpp"
#include "tips/parallel.hpp"
#include "tips/potential.hpp"
#include "tips/proposal.hpp"
#include "tips/rng.hpp"
#include "tips/stats.hpp"

namespace tips {

// One set-valued observation: the trajectory must sit inside `candidates`
// after `horizon` more time units.
template <typename S>
struct Observation {
  std::vector<S> candidates;
  double horizon = 0.0;
};

struct SmcOptions {
  ProposalConfig proposal;
  long particles = 100;
  // Resample when ESS drops below this fraction of the particle count.
  double ess_threshold = 0.5;
  int workers = 1;
  bool keep_history = true;

  void validate() const {
    proposal.validate();
    if (particles < 2)
      throw std::invalid_argument("smc particles must be >= 2");
    if (!(ess_threshold > 0.0) || ess_threshold > 1.0)
      throw std::invalid_argument("smc ess threshold must lie in (0, 1]");
  }
};

// Per-generation record, everything taken before any resampling:
// endpoints[k] and log_increment[k] come from particle k's proposal, and
// cumulative_log_weight[k] is the particle's running (unnormalized) log
// weight, reset to zero by the previous resampling step if one happened.
// When `resampled` is set, ancestors[k] names the particle whose endpoint
// particle k carries into the next generation.
template <typename S>
struct SmcGeneration {
  std::vector<S> endpoints;
  std::vector<double> log_increment;
  std::vector<double> cumulative_log_weight;
  double ess = 0.0;
  // log of the weighted mean incremental weight under the previous
  // generation's normalized weights; the generation's factor in the
  // marginal-likelihood estimate.
  double log_mean_increment = 0.0;
  bool resampled = false;
  std::vector<std::size_t> ancestors;
};

template <typename S>
struct SmcResult {
  double log_marginal = 0.0;
  // Particle states and normalized log weights after the final generation
  // (uniform when the final generation resampled).
  std::vector<S> states;
  std::vector<double> log_weights;
  std::vector<SmcGeneration<S>> history;
};

// Systematic resampling: K offspring slots filled by a single stratified
// sweep at positions (j + u) / K through the normalized cumulative weights.
// Returns the ancestor index for each slot, nondecreasing by construction;
// particle k receives K * W_k offspring in expectation. Weights may be
// unnormalized but must be non-negative with a positive sum.
inline std::vector<std::size_t> systematic_resample(
    const std::vector<double>& weights, RngStream& rng) {
  if (weights.empty())
    throw std::invalid_argument("systematic_resample: no weights");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument(
          "systematic_resample: weights must be finite and non-negative");
    total += w;
  }
  if (!(total > 0.0))
    throw std::invalid_argument("systematic_resample: all weights are zero");
  const std::size_t k = weights.size();
  const double u = rng.uniform01();
  std::vector<std::size_t> ancestors(k);
  double cumulative = weights[0];
  std::size_t i = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double position = total * (static_cast<double>(j) + u) /
                            static_cast<double>(k);
    while (cumulative <= position && i + 1 < k) cumulative += weights[++i];
    ancestors[j] = i;
  }
  return ancestors;
}

// Sequential Monte Carlo over a series of set-valued observations. Each
// generation g extends every particle with a guided proposal toward the
// observation set (potential = min over the set of the single-target
// potential), weighs the path by p * timing / p~, and resamples
// systematically when the effective sample size falls below
// ess_threshold * K. The marginal-likelihood estimate multiplies, per
// generation, the mean incremental weight under the previous generation's
// normalized weights. Particle k of generation g draws from substream
// (derive_seed(seed, g), k), so results are invariant to the worker count.
template <CtmcModel M>
SmcResult<typename M::state_type> smc_run(
    const M& model,
    const typename TargetPotential<typename M::state_type>::Distance& distance,
    const SmcOptions& options, const typename M::state_type& start,
    const std::vector<Observation<typename M::state_type>>& observations,
    std::uint64_t seed) {
  using S = typename M::state_type;
  options.validate();
  if (observations.empty())
    throw std::invalid_argument("smc_run: no observations");
  for (const auto& obs : observations) {
    if (obs.candidates.empty())
      throw std::invalid_argument("smc_run: empty observation set");
    if (!(obs.horizon > 0.0) || !std::isfinite(obs.horizon))
      throw std::invalid_argument("smc_run: observation horizons must be > 0");
  }
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t k = static_cast<std::size_t>(options.particles);

  SmcResult<S> out;
  std::vector<S> states(k, start);
  // Normalized log weights of the current population.
  std::vector<double> log_w(k, -std::log(static_cast<double>(k)));
  // Unnormalized running log weights since the last resampling step.
  std::vector<double> cumulative(k, 0.0);

  for (std::size_t g = 0; g < observations.size(); ++g) {
    const auto& obs = observations[g];
    const auto pot = set_potential<S>(distance, obs.candidates);
    SmcGeneration<S> gen;
    gen.endpoints.resize(k);
    gen.log_increment.assign(k, neg_inf);

    const std::uint64_t gen_seed = derive_seed(seed, g);
    parallel_for(options.particles, options.workers, [&](long idx) {
      const std::size_t j = static_cast<std::size_t>(idx);
      RngStream rng(gen_seed, static_cast<std::uint64_t>(idx));
      auto proposed = propose(model, pot, options.proposal, states[j], rng);
      gen.endpoints[j] = proposed.path.states.back();
      auto particle = weight_of_path(model, obs.horizon, std::move(proposed));
      gen.log_increment[j] = particle.log_weight;
    });

    std::vector<double> updated(k);
    for (std::size_t j = 0; j < k; ++j)
      updated[j] = log_w[j] + gen.log_increment[j];
    gen.log_mean_increment = log_sum_exp(updated);
    if (gen.log_mean_increment == neg_inf)
      throw WeightCollapseError(
          "smc_run: every particle weight vanished at generation " +
              std::to_string(g),
          static_cast<long>(g));
    out.log_marginal += gen.log_mean_increment;

    for (std::size_t j = 0; j < k; ++j) {
      log_w[j] = updated[j] - gen.log_mean_increment;
      cumulative[j] += gen.log_increment[j];
    }
    gen.cumulative_log_weight = cumulative;

    double sum_sq = 0.0;
    for (double lw : log_w) sum_sq += std::exp(2.0 * lw);
    gen.ess = 1.0 / sum_sq;

    states = gen.endpoints;
    if (gen.ess < options.ess_threshold * static_cast<double>(k)) {
      std::vector<double> linear(k);
      for (std::size_t j = 0; j < k; ++j) linear[j] = std::exp(log_w[j]);
      RngStream resample_rng(derive_seed(seed, g, 1), 0);
      gen.ancestors = systematic_resample(linear, resample_rng);
      gen.resampled = true;
      std::vector<S> chosen(k);
      for (std::size_t j = 0; j < k; ++j) chosen[j] = states[gen.ancestors[j]];
      states = std::move(chosen);
      std::fill(log_w.begin(), log_w.end(),
                -std::log(static_cast<double>(k)));
      std::fill(cumulative.begin(), cumulative.end(), 0.0);
    }
    if (options.keep_history) out.history.push_back(std::move(gen));
  }

  out.states = std::move(states);
  out.log_weights = std::move(log_w);
  return out;
}

}  // namespace tips
