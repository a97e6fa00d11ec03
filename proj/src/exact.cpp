#include "tips/exact.hpp"

#include <cmath>
#include <limits>

#include "tips/stats.hpp"

namespace tips {

GridPosterior grid_posterior(
    const std::function<double(std::span<const double>)>& log_unnormalized,
    std::vector<std::vector<double>> axes) {
  if (axes.empty())
    throw std::invalid_argument("grid_posterior: no grid axes");
  std::size_t total = 1;
  for (const auto& axis : axes) {
    if (axis.empty())
      throw std::invalid_argument("grid_posterior: empty grid axis");
    total *= axis.size();
  }
  GridPosterior gp;
  gp.axes = std::move(axes);
  gp.points.reserve(total);
  gp.log_unnormalized.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> point(gp.axes.size());
    std::size_t rem = flat;
    for (std::size_t d = gp.axes.size(); d-- > 0;) {
      const std::size_t n = gp.axes[d].size();
      point[d] = gp.axes[d][rem % n];
      rem /= n;
    }
    gp.log_unnormalized.push_back(log_unnormalized(point));
    gp.points.push_back(std::move(point));
  }
  gp.log_normalizer = log_sum_exp(gp.log_unnormalized);
  if (gp.log_normalizer == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument(
        "grid_posterior: posterior vanishes on the whole grid");
  gp.mass.resize(total);
  for (std::size_t i = 0; i < total; ++i)
    gp.mass[i] = std::exp(gp.log_unnormalized[i] - gp.log_normalizer);
  return gp;
}

std::vector<double> grid_marginal(const GridPosterior& gp, std::size_t dim) {
  if (dim >= gp.axes.size())
    throw std::invalid_argument("grid_marginal: dimension out of range");
  std::vector<double> out(gp.axes[dim].size(), 0.0);
  for (std::size_t i = 0; i < gp.points.size(); ++i) {
    const double v = gp.points[i][dim];
    // Axes are small; match by value to stay independent of index math.
    for (std::size_t k = 0; k < gp.axes[dim].size(); ++k)
      if (gp.axes[dim][k] == v) {
        out[k] += gp.mass[i];
        break;
      }
  }
  return out;
}

double grid_mean(const GridPosterior& gp, std::size_t dim) {
  if (dim >= gp.axes.size())
    throw std::invalid_argument("grid_mean: dimension out of range");
  double acc = 0.0;
  for (std::size_t i = 0; i < gp.points.size(); ++i)
    acc += gp.mass[i] * gp.points[i][dim];
  return acc;
}

}  // namespace tips
