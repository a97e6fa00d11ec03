#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "tips/ctmc.hpp"
#include "tips/jump_integration.hpp"
#include "tips/parallel.hpp"
#include "tips/potential.hpp"
#include "tips/proposal.hpp"
#include "tips/summary.hpp"

namespace tips {

// One importance-sampling particle: the proposed path, the probability that
// its holding times place the trajectory on the path endpoint at the
// horizon, and the resulting log weight
//   log w = log p(path) + log timing - log p~(path).
template <typename S>
struct Particle {
  ProposedPath<S> proposal;
  double log_timing = -std::numeric_limits<double>::infinity();
  double log_weight = -std::numeric_limits<double>::infinity();
  double clamp_excess = 0.0;
};

template <CtmcModel M>
Particle<typename M::state_type> weight_of_path(
    const M& model, double horizon,
    ProposedPath<typename M::state_type> proposed) {
  (void)model;
  Particle<typename M::state_type> p;
  const double timing =
      timing_probability(proposed.path.rates, horizon, &p.clamp_excess);
  p.log_timing = std::log(timing);  // log(0) = -inf for unreachable timings
  p.log_weight = proposed.log_jump_chain + p.log_timing - proposed.log_proposal;
  p.proposal = std::move(proposed);
  return p;
}

struct TipsOptions {
  ProposalConfig proposal;
  long particles = 1000;
  int workers = 1;
  bool keep_log_weights = true;
};

// Endpoint-conditioned transition-probability estimate: average of K
// independent particle weights, holding times integrated out analytically
// per path. Particle k draws from substream (seed, k), so the estimate is
// bitwise reproducible under any worker count. A zero horizon
// short-circuits to the indicator that start already satisfies the target.
template <CtmcModel M>
EstimateSummary tips_estimate(const M& model,
                              const TargetPotential<typename M::state_type>& pot,
                              const typename M::state_type& start,
                              double horizon, const TipsOptions& options,
                              std::uint64_t seed) {
  options.proposal.validate();
  if (options.particles < 1)
    throw std::invalid_argument("tips_estimate: particles < 1");
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("tips_estimate: bad horizon");
  const auto t0 = std::chrono::steady_clock::now();
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  const std::size_t n = static_cast<std::size_t>(options.particles);
  std::vector<double> lw(n, neg_inf);
  std::vector<double> clamp(n, 0.0);
  if (horizon == 0.0) {
    const double v = pot.at_target(start) ? 0.0 : neg_inf;
    std::fill(lw.begin(), lw.end(), v);
  } else {
    parallel_for(options.particles, options.workers, [&](long k) {
      RngStream rng(seed, static_cast<std::uint64_t>(k));
      auto proposed = propose(model, pot, options.proposal, start, rng);
      auto particle = weight_of_path(model, horizon, std::move(proposed));
      lw[static_cast<std::size_t>(k)] = particle.log_weight;
      clamp[static_cast<std::size_t>(k)] = particle.clamp_excess;
    });
  }
  EstimateSummary out = summarize_log_weights(std::move(lw), seed);
  for (double c : clamp)
    if (c > out.max_clamp_excess) out.max_clamp_excess = c;
  out.wall_clock_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  if (!options.keep_log_weights) out.log_weights.clear();
  return out;
}

// One row of the method-comparison sweep.
struct SweepRecord {
  std::string method;
  double horizon = 0.0;
  long particles = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double estimate = std::numeric_limits<double>::quiet_NaN();
  double abs_log_error = std::numeric_limits<double>::quiet_NaN();
  double weight_variance = std::numeric_limits<double>::quiet_NaN();
  double ess = std::numeric_limits<double>::quiet_NaN();
  double cpu_ms = 0.0;
  std::string status = "ok";
};

struct SweepPlan {
  std::vector<std::string> methods;  // any of "tips", "fs"
  std::vector<double> horizons;
  std::vector<long> particle_grid;
  int replicates = 1;
  std::uint64_t master_seed = 1;
  int workers = 1;
  long step_cap = 1'000'000;
  bool record_timing = false;
  // Per-horizon proposal tuning (e.g. the folding-model schedule); required
  // for the "tips" method.
  std::function<ProposalConfig(double)> schedule;
  // Optional exact reference; when absent abs_log_error stays NaN.
  std::function<double(double)> exact_probability;
};

// Full factorial sweep over method x horizon x particle count x replicate,
// in that row order. Each cell runs from its own derived seed; failures are
// recorded in the row's status instead of aborting the sweep.
template <CtmcModel M>
std::vector<SweepRecord> estimate_comparison_sweep(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    const typename M::state_type& start, const SweepPlan& plan) {
  if (plan.methods.empty() || plan.horizons.empty() ||
      plan.particle_grid.empty() || plan.replicates < 1)
    throw std::invalid_argument("estimate_comparison_sweep: empty plan");
  for (const auto& m : plan.methods)
    if (m != "tips" && m != "fs")
      throw std::invalid_argument("estimate_comparison_sweep: unknown method " +
                                  m);
  std::vector<SweepRecord> rows;
  std::uint64_t ordinal = 0;
  for (const auto& method : plan.methods) {
    for (double horizon : plan.horizons) {
      const double exact = plan.exact_probability
                               ? plan.exact_probability(horizon)
                               : std::numeric_limits<double>::quiet_NaN();
      for (long particles : plan.particle_grid) {
        for (int rep = 0; rep < plan.replicates; ++rep) {
          SweepRecord row;
          row.method = method;
          row.horizon = horizon;
          row.particles = particles;
          row.replicate = rep;
          row.seed = derive_seed(plan.master_seed, ordinal++);
          const auto t0 = std::chrono::steady_clock::now();
          try {
            EstimateSummary summary;
            if (method == "tips") {
              TipsOptions opt;
              opt.proposal =
                  plan.schedule ? plan.schedule(horizon) : ProposalConfig{};
              opt.proposal.step_cap = plan.step_cap;
              opt.particles = particles;
              opt.workers = plan.workers;
              opt.keep_log_weights = false;
              summary = tips_estimate(model, pot, start, horizon, opt, row.seed);
            } else {
              if (pot.targets().size() != 1)
                throw std::invalid_argument(
                    "forward sampling needs a single target state");
              summary = forward_sampling_estimate(
                  model, start, pot.targets().front(), horizon, particles,
                  row.seed, plan.workers, plan.step_cap);
            }
            row.estimate = summary.estimate;
            row.weight_variance = summary.weight_variance;
            row.ess = summary.ess;
            if (std::isfinite(exact) && exact > 0.0)
              row.abs_log_error =
                  std::abs(summary.log_estimate - std::log(exact));
            if (summary.degenerate) row.status = "degenerate";
          } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
          }
          if (plan.record_timing)
            row.cpu_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

}  // namespace tips
