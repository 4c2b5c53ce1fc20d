#include "projections.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace infmarket {

std::vector<double> project_nonneg(std::span<const double> y) {
  std::vector<double> out(y.size());
  std::transform(y.begin(), y.end(), out.begin(), [](double v) { return std::max(v, 0.0); });
  return out;
}

std::vector<double> project_budget(std::span<const double> y, const BudgetSet& set) {
  if (!(set.budget > 0.0)) throw Error(ErrorCode::InvalidArgument, "budget must be positive");
  if (set.prices.size() != y.size())
    throw Error(ErrorCode::InvalidArgument, "price and bundle lengths differ");

  std::vector<double> x = project_nonneg(y);
  if (dot(x, set.prices) <= set.budget) return x;

  auto spend = [&](double lambda) {
    double s = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j)
      s += set.prices[j] * std::max(y[j] - lambda * set.prices[j], 0.0);
    return s;
  };

  // Invariant: spend(lo) > budget >= spend(hi). Returning the hi end keeps
  // the result feasible, so projecting it again is the identity.
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j)
    if (set.prices[j] > 0.0) hi = std::max(hi, y[j] / set.prices[j]);

  const double tol = 1e-10 * set.budget;
  for (int it = 0; it < 200 && set.budget - spend(hi) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (spend(mid) > set.budget)
      lo = mid;
    else
      hi = mid;
  }
  for (std::size_t j = 0; j < y.size(); ++j)
    x[j] = std::max(y[j] - hi * set.prices[j], 0.0);
  return x;
}

std::vector<double> project_capped_simplex(std::span<const double> y) {
  std::vector<double> x = project_nonneg(y);
  double total = 0.0;
  for (double v : x) total += v;
  if (total <= 1.0) return x;

  // Sorted-threshold projection onto the probability simplex.
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double t = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - t > 0.0) theta = t;
  }
  for (std::size_t j = 0; j < y.size(); ++j) x[j] = std::max(y[j] - theta, 0.0);
  return x;
}

Allocation project_supply(const Allocation& x) {
  Allocation out(x.rows(), x.cols());
  std::vector<double> column(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    for (std::size_t i = 0; i < x.rows(); ++i) column[i] = x(i, j);
    const auto projected = project_capped_simplex(column);
    for (std::size_t i = 0; i < x.rows(); ++i) out(i, j) = projected[i];
  }
  return out;
}

}  // namespace infmarket
