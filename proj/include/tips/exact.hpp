#pragma once

#include <Eigen/Dense>
#include <deque>
#include <functional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tips/ctmc.hpp"
#include "tips/matrix_exp.hpp"

namespace tips {

// Dense image of the chain restricted to the states reachable from a start
// state. When enumeration stops at the bound, the space is marked open and
// the generator keeps full holding rates on the diagonal, so transition
// probabilities computed from it are lower bounds (mass that leaks outside
// the enumerated set is dropped); leaked_rate records each state's outflow
// to missing states.
template <typename S>
struct EnumeratedSpace {
  std::vector<S> states;  // discovery (breadth-first) order
  std::unordered_map<S, long> index;
  Eigen::MatrixXd generator;
  std::vector<double> leaked_rate;
  bool closed = true;

  long find(const S& s) const {
    auto it = index.find(s);
    return it == index.end() ? -1 : it->second;
  }
};

template <CtmcModel M>
EnumeratedSpace<typename M::state_type> enumerate_reachable(
    const M& model, const typename M::state_type& start, long bound = 2000) {
  using S = typename M::state_type;
  if (bound < 1) throw std::invalid_argument("enumerate_reachable: bound < 1");
  EnumeratedSpace<S> space;
  std::deque<long> frontier;
  auto add = [&](const S& s) -> long {
    auto it = space.index.find(s);
    if (it != space.index.end()) return it->second;
    if (static_cast<long>(space.states.size()) >= bound) {
      space.closed = false;
      return -1;
    }
    const long id = static_cast<long>(space.states.size());
    space.states.push_back(s);
    space.index.emplace(s, id);
    frontier.push_back(id);
    return id;
  };
  add(start);
  // Discover first so indices are fixed before the generator is filled.
  for (std::size_t cursor = 0; cursor < space.states.size(); ++cursor) {
    const auto& options = model.neighbors(space.states[cursor]);
    for (const auto& t : options) add(t.state);
  }
  const long n = static_cast<long>(space.states.size());
  space.generator = Eigen::MatrixXd::Zero(n, n);
  space.leaked_rate.assign(static_cast<std::size_t>(n), 0.0);
  for (long i = 0; i < n; ++i) {
    const double lambda = model.rate(space.states[static_cast<std::size_t>(i)]);
    space.generator(i, i) = -lambda;
    double inside = 0.0;
    for (const auto& t :
         model.neighbors(space.states[static_cast<std::size_t>(i)])) {
      const long j = space.find(t.state);
      if (j < 0) continue;
      space.generator(i, j) += lambda * t.prob;
      inside += lambda * t.prob;
    }
    space.leaked_rate[static_cast<std::size_t>(i)] =
        std::max(0.0, lambda - inside);
  }
  return space;
}

// exp(horizon * generator) of the enumerated space.
template <typename S>
Eigen::MatrixXd transition_matrix(const EnumeratedSpace<S>& space,
                                  double horizon) {
  if (!(horizon >= 0.0))
    throw std::invalid_argument("transition_matrix: bad horizon");
  return matrix_exponential(horizon * space.generator);
}

template <typename S>
double exact_transition_probability(const EnumeratedSpace<S>& space,
                                    const S& start, const S& end,
                                    double horizon) {
  const long i = space.find(start);
  const long j = space.find(end);
  if (i < 0 || j < 0)
    throw std::invalid_argument(
        "exact_transition_probability: state not in the enumerated space");
  const double p = transition_matrix(space, horizon)(i, j);
  return std::min(1.0, std::max(0.0, p));
}

// Posterior over a rectangular parameter grid: mass proportional to
// exp(log_unnormalized(theta)) at each grid point, normalized to sum to 1.
struct GridPosterior {
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> points;  // row-major cartesian product
  std::vector<double> log_unnormalized;
  std::vector<double> mass;
  double log_normalizer = 0.0;
};

GridPosterior grid_posterior(
    const std::function<double(std::span<const double>)>& log_unnormalized,
    std::vector<std::vector<double>> axes);

// Marginal mass of one grid dimension, aligned with axes[dim].
std::vector<double> grid_marginal(const GridPosterior& gp, std::size_t dim);

// Mean of one coordinate under the grid posterior.
double grid_mean(const GridPosterior& gp, std::size_t dim);

// Tab-separated "from to rate" lines, one per positive jump rate of the
// enumerated space, for inspection with external tools.
template <CtmcModel M>
std::string edge_list_text(const M& model,
                           const EnumeratedSpace<typename M::state_type>& space) {
  std::ostringstream out;
  out.precision(17);
  const long n = static_cast<long>(space.states.size());
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      if (i == j || !(space.generator(i, j) > 0.0)) continue;
      out << model.render(space.states[static_cast<std::size_t>(i)]) << '\t'
          << model.render(space.states[static_cast<std::size_t>(j)]) << '\t'
          << space.generator(i, j) << '\n';
    }
  return out.str();
}

}  // namespace tips
