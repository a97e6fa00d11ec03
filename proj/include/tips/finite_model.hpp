#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tips/ctmc.hpp"
#include "tips/potential.hpp"

namespace tips {

// Explicitly tabulated chain on states 0..n-1 with human-readable names.
// Holding rates and jump-chain rows are validated on construction: rows sum
// to 1 within 1e-9 (then renormalized exactly), probabilities are positive,
// self-loops are rejected, and a positive-rate state must have successors.
class FiniteModel {
 public:
  using state_type = int;

  FiniteModel(std::vector<std::string> names, std::vector<double> rates,
              std::vector<std::vector<Transition<int>>> adjacency);

  // Builds from a generator matrix: off-diagonal entries are jump rates;
  // the diagonal must equal minus the row sum of the off-diagonal part.
  static FiniteModel from_generator(std::vector<std::string> names,
                                    const Eigen::MatrixXd& q);

  double rate(int s) const { return rates_.at(static_cast<std::size_t>(s)); }
  const std::vector<Transition<int>>& neighbors(int s) const {
    return adjacency_.at(static_cast<std::size_t>(s));
  }
  std::string render(int s) const {
    return names_.at(static_cast<std::size_t>(s));
  }

  int size() const { return static_cast<int>(names_.size()); }
  int index_of(const std::string& name) const;  // throws on unknown name
  const std::vector<std::string>& names() const { return names_; }
  Eigen::MatrixXd generator() const;

 private:
  std::vector<std::string> names_;
  std::vector<double> rates_;
  std::vector<std::vector<Transition<int>>> adjacency_;
};

// Potential for finite chains: rho(x) = minimum number of jumps from x to
// any target along positive-probability edges (directed). States that
// cannot reach a target get a large finite potential so the violation
// surfaces through the condition-3 check rather than here.
TargetPotential<int> graph_distance_potential(const FiniteModel& model,
                                              std::vector<int> targets);

}  // namespace tips
