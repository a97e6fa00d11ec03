#pragma once

#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tips/errors.hpp"
#include "tips/parallel.hpp"
#include "tips/rng.hpp"
#include "tips/summary.hpp"

namespace tips {

// One outgoing edge of the embedded jump chain: successor state and its
// jump-chain probability nu(x, state) (> 0; successors sum to 1).
template <typename S>
struct Transition {
  S state;
  double prob;
};

// A model exposes the holding rate lambda(x), the ordered jump-chain
// successor list, and a human-readable rendering of states. Successor order
// must be deterministic; models must be read-only after construction so
// they can be evaluated from several threads at once.
template <typename M>
concept CtmcModel = requires(const M& m, const typename M::state_type& s) {
  typename M::state_type;
  { m.rate(s) } -> std::convertible_to<double>;
  {
    m.neighbors(s)
  } -> std::convertible_to<std::vector<Transition<typename M::state_type>>>;
  { m.render(s) } -> std::convertible_to<std::string>;
};

// Jump-chain skeleton: visited states plus each state's holding rate
// (rates[i] = lambda(states[i]); both vectors have the same length).
template <typename S>
struct JumpChainPath {
  std::vector<S> states;
  std::vector<double> rates;
};

// A jump-chain path with holding times attached. Entries before the last
// are the completed stays; the final entry is the drawn stay that runs past
// the horizon, or the residual horizon - elapsed when the final state is
// absorbing.
template <typename S>
struct TimedTrajectory {
  JumpChainPath<S> path;
  std::vector<double> holding_times;
};

namespace detail {

// Sample a successor by its jump-chain probability. Falls back to the last
// entry if rounding leaves the cursor past the accumulated mass.
template <typename S>
const S& sample_transition(const std::vector<Transition<S>>& options,
                           RngStream& rng) {
  const double u = rng.uniform01();
  double cum = 0.0;
  for (const auto& t : options) {
    cum += t.prob;
    if (u < cum) return t.state;
  }
  return options.back().state;
}

}  // namespace detail

// Gillespie-style simulation of the model from start until the horizon.
template <CtmcModel M>
TimedTrajectory<typename M::state_type> forward_simulate(
    const M& model, const typename M::state_type& start, double horizon,
    RngStream& rng, long step_cap = 1'000'000) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("forward_simulate: bad horizon");
  TimedTrajectory<typename M::state_type> out;
  out.path.states.push_back(start);
  double elapsed = 0.0;
  long steps = 0;
  for (;;) {
    const auto& x = out.path.states.back();
    const double lambda = model.rate(x);
    out.path.rates.push_back(lambda);
    if (lambda <= 0.0) {  // absorbing: occupies the rest of the horizon
      out.holding_times.push_back(horizon - elapsed);
      return out;
    }
    const double stay = rng.exponential(lambda);
    out.holding_times.push_back(stay);
    if (elapsed + stay > horizon) return out;
    elapsed += stay;
    const auto& options = model.neighbors(x);
    if (options.empty())
      throw std::invalid_argument(
          "forward_simulate: positive rate but no successors at " +
          model.render(x));
    if (++steps > step_cap)
      throw StepCapError("forward_simulate: exceeded step cap of " +
                         std::to_string(step_cap));
    out.path.states.push_back(detail::sample_transition(options, rng));
  }
}

// log of the jump-chain probability of the path: sum of log nu over its
// consecutive transitions; -inf if any transition is unsupported.
template <CtmcModel M>
double jump_chain_log_probability(const M& model,
                                  const JumpChainPath<typename M::state_type>& path) {
  if (path.states.empty())
    throw std::invalid_argument("jump_chain_log_probability: empty path");
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    const auto& options = model.neighbors(path.states[i]);
    double p = 0.0;
    for (const auto& t : options)
      if (t.state == path.states[i + 1]) {
        p = t.prob;
        break;
      }
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += std::log(p);
  }
  return acc;
}

// Plain Monte Carlo baseline: simulate K trajectories forward and average
// the endpoint indicator 1{X_horizon = target}.
template <CtmcModel M>
EstimateSummary forward_sampling_estimate(const M& model,
                                          const typename M::state_type& start,
                                          const typename M::state_type& target,
                                          double horizon, long particles,
                                          std::uint64_t seed, int workers = 1,
                                          long step_cap = 1'000'000) {
  if (particles < 1)
    throw std::invalid_argument("forward_sampling_estimate: particles < 1");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(static_cast<std::size_t>(particles), neg_inf);
  parallel_for(particles, workers, [&](long k) {
    RngStream rng(seed, static_cast<std::uint64_t>(k));
    const auto traj = forward_simulate(model, start, horizon, rng, step_cap);
    if (traj.path.states.back() == target) lw[static_cast<std::size_t>(k)] = 0.0;
  });
  return summarize_log_weights(std::move(lw), seed);
}

}  // namespace tips
