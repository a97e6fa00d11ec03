#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tips/ctmc.hpp"
#include "tips/errors.hpp"
#include "tips/potential.hpp"
#include "tips/rng.hpp"

namespace tips {

// Tuning of the guided path proposal: alpha is the mixture weight pushed
// onto potential-decreasing jumps (must exceed 1/2 so the potential is a
// supermartingale under unit steps), beta the stopping probability of the
// geometric excursion count (beta = 1 forces a single target visit, which
// drops support for paths revisiting the target).
struct ProposalConfig {
  double alpha = 2.0 / 3.0;
  double beta = 0.5;
  long step_cap = 1'000'000;

  void validate() const {
    if (!(alpha > 0.5) || !(alpha < 1.0))
      throw std::invalid_argument("proposal alpha must lie in (1/2, 1)");
    if (!(beta > 0.0) || beta > 1.0)
      throw std::invalid_argument("proposal beta must lie in (0, 1]");
    if (step_cap < 1)
      throw std::invalid_argument("proposal step cap must be >= 1");
  }
};

// Jump-chain successors of x split by whether they decrease the potential,
// with the jump-chain mass of each part.
template <typename S>
struct NeighborPartition {
  std::vector<Transition<S>> decreasing;
  std::vector<Transition<S>> other;
  double decreasing_mass = 0.0;
  double other_mass = 0.0;
};

template <CtmcModel M>
NeighborPartition<typename M::state_type> decreasing_set(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    const typename M::state_type& x) {
  const long rho = pot(x);
  if (rho == 0)
    throw std::invalid_argument(
        "decreasing_set: potential is 0 at " + model.render(x) +
        "; no successor can decrease it further");
  NeighborPartition<typename M::state_type> part;
  const auto& options = model.neighbors(x);
  for (const auto& t : options) {
    if (pot(t.state) < rho) {
      part.decreasing_mass += t.prob;
      part.decreasing.push_back(t);
    } else {
      part.other_mass += t.prob;
      part.other.push_back(t);
    }
  }
  if (part.decreasing.empty())
    throw PotentialError("no potential-decreasing successor at " +
                         model.render(x) +
                         " (potential validity condition 3 violated)");
  return part;
}

// One realized proposal step: the sampled successor, its probability under
// the guided kernel, and its jump-chain probability nu(x, next).
template <typename S>
struct ProposalStep {
  S next;
  double log_mass;
  double log_nu;
};

namespace detail {

template <typename S>
const Transition<S>* pick_in_branch(const std::vector<Transition<S>>& branch,
                                    double branch_mass, RngStream& rng) {
  const double u = rng.uniform01() * branch_mass;
  double cum = 0.0;
  for (const auto& t : branch) {
    cum += t.prob;
    if (u < cum) return &t;
  }
  return &branch.back();
}

}  // namespace detail

// Single step of the guided kernel: with probability
// alpha_x = max(alpha, nu(D)) jump into the potential-decreasing set D
// (within-branch probabilities proportional to nu), otherwise into its
// complement. At a target state D is empty by construction and the step
// falls back to the plain jump chain (needed when an excursion must leave
// the target).
template <CtmcModel M>
ProposalStep<typename M::state_type> proposal_transition(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    const ProposalConfig& config, const typename M::state_type& x,
    RngStream& rng) {
  const auto& options = model.neighbors(x);
  if (options.empty())
    throw PotentialError("proposal cannot leave " + model.render(x) +
                         ": state has no successors");
  if (pot(x) == 0) {
    const auto* t = detail::pick_in_branch(options, 1.0, rng);
    const double lp = std::log(t->prob);
    return {t->state, lp, lp};
  }
  const auto part = decreasing_set(model, pot, x);
  if (part.other.empty()) {
    // Every successor decreases the potential; the guided kernel equals the
    // jump chain restricted to D (i.e. the jump chain itself).
    const auto* t =
        detail::pick_in_branch(part.decreasing, part.decreasing_mass, rng);
    return {t->state, std::log(t->prob / part.decreasing_mass),
            std::log(t->prob)};
  }
  const double alpha_x = std::max(config.alpha, part.decreasing_mass);
  if (rng.uniform01() < alpha_x) {
    const auto* t =
        detail::pick_in_branch(part.decreasing, part.decreasing_mass, rng);
    return {t->state,
            std::log(alpha_x) + std::log(t->prob / part.decreasing_mass),
            std::log(t->prob)};
  }
  const auto* t = detail::pick_in_branch(part.other, part.other_mass, rng);
  return {t->state, std::log1p(-alpha_x) + std::log(t->prob / part.other_mass),
          std::log(t->prob)};
}

// Probability mass the guided kernel puts on the realized step x -> next,
// recomputed without sampling (audit / replay path). -inf if next is not a
// successor of x.
template <CtmcModel M>
double proposal_step_log_mass(const M& model,
                              const TargetPotential<typename M::state_type>& pot,
                              const ProposalConfig& config,
                              const typename M::state_type& x,
                              const typename M::state_type& next) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  const auto& options = model.neighbors(x);
  double nu = 0.0;
  for (const auto& t : options)
    if (t.state == next) {
      nu = t.prob;
      break;
    }
  if (!(nu > 0.0)) return neg_inf;
  const long rho = pot(x);
  if (rho == 0) return std::log(nu);
  double dec_mass = 0.0, other_mass = 0.0;
  bool next_decreases = false;
  for (const auto& t : options) {
    const bool dec = pot(t.state) < rho;
    (dec ? dec_mass : other_mass) += t.prob;
    if (t.state == next) next_decreases = dec;
  }
  if (!(dec_mass > 0.0))
    throw PotentialError("no potential-decreasing successor at " +
                         model.render(x) +
                         " (potential validity condition 3 violated)");
  if (!(other_mass > 0.0)) return std::log(nu / dec_mass);
  const double alpha_x = std::max(config.alpha, dec_mass);
  return next_decreases
             ? std::log(alpha_x) + std::log(nu / dec_mass)
             : std::log1p(-alpha_x) + std::log(nu / other_mass);
}

// |1 - sum over successors of the guided step mass| at x; should sit at
// rounding level whenever the kernel is well defined.
template <CtmcModel M>
double proposal_normalization_gap(const M& model,
                                  const TargetPotential<typename M::state_type>& pot,
                                  const ProposalConfig& config,
                                  const typename M::state_type& x) {
  const auto& options = model.neighbors(x);
  double total = 0.0;
  for (const auto& t : options)
    total += std::exp(proposal_step_log_mass(model, pot, config, x, t.state));
  return std::abs(1.0 - total);
}

// A proposed jump path with its accumulated log proposal probability
// (including the excursion-count factor once built by propose()) and the
// log jump-chain probability of the same path.
template <typename S>
struct ProposedPath {
  JumpChainPath<S> path;
  double log_proposal = 0.0;
  double log_jump_chain = 0.0;
  long excursions = 1;
};

// Guided walk from start until the potential first hits 0. With
// require_move the walk must take at least one step before it may stop, so
// a start on the target set leaves and returns (one excursion).
template <CtmcModel M>
ProposedPath<typename M::state_type> propose_hitting_path(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    const ProposalConfig& config, const typename M::state_type& start,
    bool require_move, RngStream& rng) {
  config.validate();
  ProposedPath<typename M::state_type> out;
  out.path.states.push_back(start);
  out.path.rates.push_back(model.rate(start));
  long steps = 0;
  for (;;) {
    const auto& x = out.path.states.back();
    if (pot(x) == 0 && (!require_move || steps > 0)) return out;
    if (steps >= config.step_cap)
      throw StepCapError("guided proposal exceeded step cap of " +
                         std::to_string(config.step_cap));
    auto step = proposal_transition(model, pot, config, x, rng);
    out.log_proposal += step.log_mass;
    out.log_jump_chain += step.log_nu;
    out.path.rates.push_back(model.rate(step.next));
    out.path.states.push_back(std::move(step.next));
    ++steps;
  }
}

// Full endpoint-conditioned path proposal: a hitting path to the target set
// followed by a geometric number of forced excursions that leave and
// re-enter it. The returned log_proposal includes the excursion-count pmf.
template <CtmcModel M>
ProposedPath<typename M::state_type> propose(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    const ProposalConfig& config, const typename M::state_type& start,
    RngStream& rng) {
  auto out = propose_hitting_path(model, pot, config, start, false, rng);
  const long n = rng.geometric_count(config.beta);
  out.log_proposal += geometric_log_pmf(n, config.beta);
  out.excursions = n;
  for (long i = 1; i < n; ++i) {
    const auto from = out.path.states.back();
    auto exc = propose_hitting_path(model, pot, config, from, true, rng);
    out.log_proposal += exc.log_proposal;
    out.log_jump_chain += exc.log_jump_chain;
    for (std::size_t j = 1; j < exc.path.states.size(); ++j) {
      out.path.states.push_back(std::move(exc.path.states[j]));
      out.path.rates.push_back(exc.path.rates[j]);
    }
  }
  return out;
}

// Replay audit: the log probability that propose() generates exactly this
// path. Splits the path at its target visits (each visit ends a segment),
// multiplies the guided step masses, and adds the excursion-count pmf.
// Returns -inf for paths propose() cannot emit.
template <CtmcModel M>
double proposal_log_probability(const M& model,
                                const TargetPotential<typename M::state_type>& pot,
                                const ProposalConfig& config,
                                const JumpChainPath<typename M::state_type>& path) {
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  if (path.states.empty()) return neg_inf;
  if (pot(path.states.back()) != 0) return neg_inf;
  // Each target visit ends one proposal segment, so the visit count is the
  // excursion count the geometric draw must have produced.
  long visits = 0;
  for (const auto& s : path.states)
    if (pot(s) == 0) ++visits;
  double acc = geometric_log_pmf(visits, config.beta);
  if (acc == neg_inf) return neg_inf;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    const double step = proposal_step_log_mass(model, pot, config,
                                               path.states[i], path.states[i + 1]);
    if (step == neg_inf) return neg_inf;
    acc += step;
  }
  return acc;
}

}  // namespace tips
