#include "tips/finite_model.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <unordered_map>

namespace tips {

FiniteModel::FiniteModel(std::vector<std::string> names,
                         std::vector<double> rates,
                         std::vector<std::vector<Transition<int>>> adjacency)
    : names_(std::move(names)),
      rates_(std::move(rates)),
      adjacency_(std::move(adjacency)) {
  const std::size_t n = names_.size();
  if (n == 0) throw std::invalid_argument("finite model: no states");
  if (rates_.size() != n || adjacency_.size() != n)
    throw std::invalid_argument("finite model: size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rates_[i] >= 0.0) || !std::isfinite(rates_[i]))
      throw std::invalid_argument("finite model: bad rate at " + names_[i]);
    auto& row = adjacency_[i];
    if (rates_[i] > 0.0 && row.empty())
      throw std::invalid_argument("finite model: positive rate but no successors at " +
                                  names_[i]);
    if (rates_[i] == 0.0 && !row.empty())
      throw std::invalid_argument("finite model: absorbing state with successors at " +
                                  names_[i]);
    double sum = 0.0;
    for (const auto& t : row) {
      if (t.state < 0 || t.state >= static_cast<int>(n))
        throw std::invalid_argument("finite model: successor out of range");
      if (t.state == static_cast<int>(i))
        throw std::invalid_argument("finite model: self-loop at " + names_[i]);
      if (!(t.prob > 0.0))
        throw std::invalid_argument("finite model: non-positive probability");
      sum += t.prob;
    }
    if (!row.empty()) {
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("finite model: jump probabilities at " +
                                    names_[i] + " sum to " + std::to_string(sum));
      for (auto& t : row) t.prob /= sum;
    }
  }
}

FiniteModel FiniteModel::from_generator(std::vector<std::string> names,
                                        const Eigen::MatrixXd& q) {
  const long n = q.rows();
  if (q.cols() != n || static_cast<long>(names.size()) != n)
    throw std::invalid_argument("from_generator: shape mismatch");
  std::vector<double> rates(static_cast<std::size_t>(n), 0.0);
  std::vector<std::vector<Transition<int>>> adj(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    double total = 0.0;
    for (long j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r = q(i, j);
      if (!(r >= 0.0))
        throw std::invalid_argument("from_generator: negative jump rate");
      total += r;
    }
    const double scale = std::max(1.0, total);
    if (std::abs(q(i, i) + total) > 1e-9 * scale)
      throw std::invalid_argument(
          "from_generator: diagonal does not match row sum");
    rates[static_cast<std::size_t>(i)] = total;
    if (total > 0.0)
      for (long j = 0; j < n; ++j) {
        if (i == j || !(q(i, j) > 0.0)) continue;
        adj[static_cast<std::size_t>(i)].push_back(
            {static_cast<int>(j), q(i, j) / total});
      }
  }
  return FiniteModel(std::move(names), std::move(rates), std::move(adj));
}

int FiniteModel::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("finite model: unknown state " + name);
}

Eigen::MatrixXd FiniteModel::generator() const {
  const int n = size();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    q(i, i) = -rates_[static_cast<std::size_t>(i)];
    for (const auto& t : adjacency_[static_cast<std::size_t>(i)])
      q(i, t.state) = rates_[static_cast<std::size_t>(i)] * t.prob;
  }
  return q;
}

TargetPotential<int> graph_distance_potential(const FiniteModel& model,
                                              std::vector<int> targets) {
  const int n = model.size();
  if (targets.empty())
    throw std::invalid_argument("graph_distance_potential: no targets");
  for (int t : targets)
    if (t < 0 || t >= n)
      throw std::invalid_argument("graph_distance_potential: target out of range");
  // One backward BFS per target over the reversed positive-probability
  // edges; the potential takes the minimum over targets. The returned
  // distance function stays total in its second argument (callers such as
  // the particle filter reuse it with fresh candidate sets), so tables for
  // targets beyond the declared ones are filled in lazily under a lock.
  const long unreachable = std::numeric_limits<long>::max() / 4;
  auto reverse = std::make_shared<std::vector<std::vector<int>>>(
      static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (const auto& t : model.neighbors(i))
      (*reverse)[static_cast<std::size_t>(t.state)].push_back(i);

  auto bfs = [reverse, unreachable, n](int target) {
    std::vector<long> dist(static_cast<std::size_t>(n), unreachable);
    std::deque<int> frontier{target};
    dist[static_cast<std::size_t>(target)] = 0;
    while (!frontier.empty()) {
      const int x = frontier.front();
      frontier.pop_front();
      for (int prev : (*reverse)[static_cast<std::size_t>(x)])
        if (dist[static_cast<std::size_t>(prev)] == unreachable) {
          dist[static_cast<std::size_t>(prev)] =
              dist[static_cast<std::size_t>(x)] + 1;
          frontier.push_back(prev);
        }
    }
    return dist;
  };

  struct TableCache {
    std::shared_mutex mutex;
    std::unordered_map<int, std::vector<long>> tables;
  };
  auto cache = std::make_shared<TableCache>();
  for (int target : targets)
    cache->tables.try_emplace(target, bfs(target));

  auto distance = [cache, bfs, n](const int& x, const int& y) -> long {
    if (x < 0 || x >= n || y < 0 || y >= n)
      throw std::invalid_argument("graph distance: state out of range");
    {
      std::shared_lock lock(cache->mutex);
      const auto it = cache->tables.find(y);
      if (it != cache->tables.end())
        return it->second[static_cast<std::size_t>(x)];
    }
    std::unique_lock lock(cache->mutex);
    const auto [it, inserted] = cache->tables.try_emplace(y);
    if (inserted) it->second = bfs(y);
    return it->second[static_cast<std::size_t>(x)];
  };
  return TargetPotential<int>(distance, std::move(targets));
}

}  // namespace tips
