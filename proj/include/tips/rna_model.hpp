#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tips/ctmc.hpp"

namespace tips {

// Folding dynamics on non-crossing secondary structures of a fixed RNA
// sequence. States are dot-bracket strings; moves add or remove a single
// base pair. Energy is -energy_per_pair * (number of pairs); jump rates
// follow the Kawasaki rule
//   rate(x -> x') = exp((E(x) - E(x')) / (d * kt_scale)),
// with divisor d = 2 when kawasaki_halved is set (a common alternative
// convention) and d = 1 otherwise.
struct RnaParams {
  double energy_per_pair = 1.0;
  double kt_scale = 1.0;
  int hairpin_min = 3;  // minimum unpaired bases enclosed by a pair
  bool kawasaki_halved = false;
};

double kawasaki_rate(const RnaParams& params, double energy_from,
                     double energy_to);

// Proposal tuning used for folding targets: alpha = 2/3 and
// beta = max(1/4, 1 - horizon/16).
std::pair<double, double> rna_tuning_schedule(double horizon);

// Pair decoding/encoding between dot-bracket strings and sorted (i, j)
// lists. decode throws on unbalanced input.
std::vector<std::pair<int, int>> decode_pairs(std::string_view dot_bracket);
std::string encode_pairs(std::span<const std::pair<int, int>> pairs,
                         std::size_t length);

// Number of base pairs present in one structure but not the other.
long pair_set_distance(std::string_view a, std::string_view b);

class RnaModel {
 public:
  using state_type = std::string;

  RnaModel(std::string sequence, RnaParams params);

  // Restricts the dynamics to an explicit subset of structures: moves
  // leaving the subset are removed from the jump chain (the model changes;
  // holding rates shrink accordingly).
  RnaModel(std::string sequence, RnaParams params,
           std::vector<std::string> allowed_states);

  double rate(const std::string& x) const;
  std::vector<Transition<std::string>> neighbors(const std::string& x) const;
  std::string render(const std::string& x) const { return x; }

  double energy(const std::string& x) const;
  std::string unfolded() const { return std::string(sequence_.size(), '.'); }
  const std::string& sequence() const { return sequence_; }
  const RnaParams& params() const { return params_; }

  // Structures one pair-addition or pair-removal away, unweighted, in a
  // deterministic order (removals by pair position, then additions).
  std::vector<std::string> raw_moves(const std::string& x) const;

 private:
  void check_state(const std::string& x) const;
  bool pairable(int i, int j) const;

  std::string sequence_;
  RnaParams params_;
  std::shared_ptr<const std::unordered_set<std::string>> allowed_;
};

// The maximum-pairing structure among the given states; ties break toward
// the lexicographically smallest dot-bracket string.
std::string deepest_structure(std::span<const std::string> states);

}  // namespace tips
