#pragma once

#include <functional>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tips/ctmc.hpp"

namespace tips {

// Integer guidance potential toward a target set: rho(x) = min over the set
// of a per-pair distance. Validity contract (checked by validate_potential,
// relied on by the guided proposal):
//   1. rho(x) = 0 exactly on the target set;
//   2. single jumps change rho by exactly +-1 (advisory; violations degrade
//      the hitting-time guarantee but not correctness of the weights);
//   3. every reachable non-target state has a jump-chain successor with
//      strictly smaller rho.
template <typename S>
class TargetPotential {
 public:
  using Distance = std::function<long(const S&, const S&)>;

  TargetPotential(Distance distance, S target)
      : distance_(std::move(distance)), targets_{std::move(target)} {}

  TargetPotential(Distance distance, std::vector<S> targets)
      : distance_(std::move(distance)), targets_(std::move(targets)) {
    if (targets_.empty())
      throw std::invalid_argument("TargetPotential: empty target set");
  }

  long operator()(const S& x) const {
    long best = std::numeric_limits<long>::max();
    for (const auto& t : targets_) {
      const long d = distance_(x, t);
      if (d < best) best = d;
    }
    return best;
  }

  bool at_target(const S& x) const { return (*this)(x) == 0; }

  const std::vector<S>& targets() const { return targets_; }
  const Distance& distance() const { return distance_; }

 private:
  Distance distance_;
  std::vector<S> targets_;
};

// Potential toward a set of candidate endpoint states (the set-valued
// observation case): the pointwise minimum of the single-target potentials.
template <typename S>
TargetPotential<S> set_potential(typename TargetPotential<S>::Distance distance,
                                 std::vector<S> targets) {
  return TargetPotential<S>(std::move(distance), std::move(targets));
}

struct PotentialNote {
  std::string state;
  std::string detail;
};

struct PotentialReport {
  long states_checked = 0;
  bool zero_exactly_on_targets = true;   // condition 1
  bool decreasing_step_everywhere = true;  // condition 3
  bool unit_steps = true;                // condition 2 (advisory)
  std::set<long> observed_deltas;
  std::vector<PotentialNote> violations;  // conditions 1 and 3
  std::vector<PotentialNote> warnings;    // condition 2
  long violation_count = 0;
  long warning_count = 0;

  bool valid() const {
    return zero_exactly_on_targets && decreasing_step_everywhere;
  }
};

// Checks the potential's validity conditions over the given states. Stored
// notes are capped at detail_cap per category; the counts are exact.
template <CtmcModel M>
PotentialReport validate_potential(
    const M& model, const TargetPotential<typename M::state_type>& pot,
    std::span<const typename M::state_type> states,
    std::size_t detail_cap = 20) {
  PotentialReport report;
  auto is_target = [&](const typename M::state_type& x) {
    for (const auto& t : pot.targets())
      if (t == x) return true;
    return false;
  };
  auto violation = [&](const typename M::state_type& x, std::string detail) {
    ++report.violation_count;
    if (report.violations.size() < detail_cap)
      report.violations.push_back({model.render(x), std::move(detail)});
  };
  auto warning = [&](const typename M::state_type& x, std::string detail) {
    ++report.warning_count;
    if (report.warnings.size() < detail_cap)
      report.warnings.push_back({model.render(x), std::move(detail)});
  };

  for (const auto& x : states) {
    ++report.states_checked;
    const long rho = pot(x);
    if (rho < 0) {
      report.zero_exactly_on_targets = false;
      violation(x, "negative potential " + std::to_string(rho));
      continue;
    }
    const bool member = is_target(x);
    if (member != (rho == 0)) {
      report.zero_exactly_on_targets = false;
      violation(x, member ? "target state with potential " + std::to_string(rho)
                          : "potential 0 outside the target set");
    }
    const auto& options = model.neighbors(x);
    bool has_decreasing = false;
    for (const auto& t : options) {
      const long delta = pot(t.state) - rho;
      report.observed_deltas.insert(delta);
      if (delta < 0) has_decreasing = true;
      if (delta != 1 && delta != -1) {
        report.unit_steps = false;
        warning(x, "jump to " + model.render(t.state) + " changes potential by " +
                       std::to_string(delta));
      }
    }
    if (rho > 0 && !has_decreasing) {
      report.decreasing_step_everywhere = false;
      violation(x, "no potential-decreasing successor");
    }
  }
  return report;
}

}  // namespace tips
