#include "tips/rna_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace tips {

double kawasaki_rate(const RnaParams& params, double energy_from,
                     double energy_to) {
  const double divisor = params.kawasaki_halved ? 2.0 : 1.0;
  return std::exp((energy_from - energy_to) / (divisor * params.kt_scale));
}

std::pair<double, double> rna_tuning_schedule(double horizon) {
  return {2.0 / 3.0, std::max(0.25, 1.0 - horizon / 16.0)};
}

std::vector<std::pair<int, int>> decode_pairs(std::string_view dot_bracket) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> stack;
  for (int i = 0; i < static_cast<int>(dot_bracket.size()); ++i) {
    const char c = dot_bracket[static_cast<std::size_t>(i)];
    if (c == '(') {
      stack.push_back(i);
    } else if (c == ')') {
      if (stack.empty())
        throw std::invalid_argument("decode_pairs: unbalanced brackets");
      pairs.emplace_back(stack.back(), i);
      stack.pop_back();
    } else if (c != '.') {
      throw std::invalid_argument("decode_pairs: unexpected character");
    }
  }
  if (!stack.empty())
    throw std::invalid_argument("decode_pairs: unbalanced brackets");
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::string encode_pairs(std::span<const std::pair<int, int>> pairs,
                         std::size_t length) {
  std::string out(length, '.');
  for (const auto& [i, j] : pairs) {
    if (i < 0 || j <= i || j >= static_cast<int>(length))
      throw std::invalid_argument("encode_pairs: pair out of range");
    if (out[static_cast<std::size_t>(i)] != '.' ||
        out[static_cast<std::size_t>(j)] != '.')
      throw std::invalid_argument("encode_pairs: duplicated index");
    out[static_cast<std::size_t>(i)] = '(';
    out[static_cast<std::size_t>(j)] = ')';
  }
  return out;
}

long pair_set_distance(std::string_view a, std::string_view b) {
  const auto pa = decode_pairs(a);
  const auto pb = decode_pairs(b);
  const std::set<std::pair<int, int>> sa(pa.begin(), pa.end());
  const std::set<std::pair<int, int>> sb(pb.begin(), pb.end());
  long diff = 0;
  for (const auto& p : sa)
    if (!sb.count(p)) ++diff;
  for (const auto& p : sb)
    if (!sa.count(p)) ++diff;
  return diff;
}

RnaModel::RnaModel(std::string sequence, RnaParams params)
    : sequence_(std::move(sequence)), params_(params) {
  if (sequence_.empty())
    throw std::invalid_argument("rna model: empty sequence");
  for (char c : sequence_)
    if (c != 'A' && c != 'C' && c != 'G' && c != 'U')
      throw std::invalid_argument("rna model: sequence must be over ACGU");
  if (!(params_.energy_per_pair > 0.0) || !(params_.kt_scale > 0.0) ||
      params_.hairpin_min < 0)
    throw std::invalid_argument("rna model: bad parameters");
}

RnaModel::RnaModel(std::string sequence, RnaParams params,
                   std::vector<std::string> allowed_states)
    : RnaModel(std::move(sequence), params) {
  auto set = std::make_shared<std::unordered_set<std::string>>();
  for (auto& s : allowed_states) {
    if (s.size() != sequence_.size())
      throw std::invalid_argument("rna model: subset state of wrong length");
    decode_pairs(s);  // validates bracket structure
    set->insert(std::move(s));
  }
  if (set->empty())
    throw std::invalid_argument("rna model: empty state subset");
  allowed_ = std::move(set);
}

void RnaModel::check_state(const std::string& x) const {
  if (x.size() != sequence_.size())
    throw std::invalid_argument("rna model: state of wrong length");
  if (allowed_ && !allowed_->count(x))
    throw std::invalid_argument("rna model: state outside the configured subset");
}

bool RnaModel::pairable(int i, int j) const {
  const char a = sequence_[static_cast<std::size_t>(i)];
  const char b = sequence_[static_cast<std::size_t>(j)];
  const auto match = [](char x, char y) {
    return (x == 'C' && y == 'G') || (x == 'A' && y == 'U') ||
           (x == 'G' && y == 'U');
  };
  return match(a, b) || match(b, a);
}

std::vector<std::string> RnaModel::raw_moves(const std::string& x) const {
  check_state(x);
  const auto pairs = decode_pairs(x);
  const int n = static_cast<int>(sequence_.size());
  std::vector<std::string> out;

  // Removals, in pair order.
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto rest = pairs;
    rest.erase(rest.begin() + static_cast<long>(k));
    out.push_back(encode_pairs(rest, sequence_.size()));
  }

  // Additions (i, j) in lexicographic order: both ends unpaired, letters
  // complementary, enough enclosed bases, and no crossing with an existing
  // pair (exactly one endpoint strictly inside (i, j)).
  for (int i = 0; i < n; ++i) {
    if (x[static_cast<std::size_t>(i)] != '.') continue;
    for (int j = i + params_.hairpin_min + 1; j < n; ++j) {
      if (x[static_cast<std::size_t>(j)] != '.') continue;
      if (!pairable(i, j)) continue;
      bool crossing = false;
      for (const auto& [a, b] : pairs) {
        const bool a_in = i < a && a < j;
        const bool b_in = i < b && b < j;
        if (a_in != b_in) {
          crossing = true;
          break;
        }
      }
      if (crossing) continue;
      auto grown = pairs;
      grown.emplace_back(i, j);
      std::sort(grown.begin(), grown.end());
      out.push_back(encode_pairs(grown, sequence_.size()));
    }
  }

  if (allowed_) {
    std::vector<std::string> kept;
    kept.reserve(out.size());
    for (auto& s : out)
      if (allowed_->count(s)) kept.push_back(std::move(s));
    out = std::move(kept);
  }
  return out;
}

double RnaModel::energy(const std::string& x) const {
  check_state(x);
  const auto pairs = decode_pairs(x);
  return -params_.energy_per_pair * static_cast<double>(pairs.size());
}

double RnaModel::rate(const std::string& x) const {
  const double e = energy(x);
  double total = 0.0;
  for (const auto& y : raw_moves(x))
    total += kawasaki_rate(params_, e, energy(y));
  return total;
}

std::vector<Transition<std::string>> RnaModel::neighbors(
    const std::string& x) const {
  const double e = energy(x);
  const auto moves = raw_moves(x);
  std::vector<Transition<std::string>> out;
  out.reserve(moves.size());
  double total = 0.0;
  for (const auto& y : moves) {
    const double r = kawasaki_rate(params_, e, energy(y));
    total += r;
    out.push_back({y, r});
  }
  for (auto& t : out) t.prob /= total;
  return out;
}

std::string deepest_structure(std::span<const std::string> states) {
  if (states.empty())
    throw std::invalid_argument("deepest_structure: no states");
  const std::string* best = nullptr;
  long best_pairs = -1;
  for (const auto& s : states) {
    const long np = static_cast<long>(decode_pairs(s).size());
    if (np > best_pairs || (np == best_pairs && s < *best)) {
      best = &s;
      best_pairs = np;
    }
  }
  return *best;
}

}  // namespace tips
