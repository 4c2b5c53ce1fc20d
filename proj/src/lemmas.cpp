#include "lemmas.hpp"

#include <algorithm>
#include <cmath>

#include "best_response.hpp"

namespace infmarket {

double penalized_objective(const MarketInstance& mkt, std::size_t i, std::span<const double> x_i,
                           const Allocation& x_others, std::span<const double> p, double eps_u) {
  const double b = mkt.budget(i);
  return b * std::log(utility_with_bundle(mkt, i, x_others, x_i) + eps_u) + b - dot(x_i, p);
}

LambdaOneCheck verify_lambda_one(const MarketInstance& mkt, std::size_t i,
                                 const Allocation& x_others, std::span<const double> p,
                                 const LambdaOneConfig& cfg) {
  const std::size_t m = mkt.goods();
  const double b = mkt.budget(i);
  LambdaOneCheck out;

  const Bundle constrained = best_response_closed(mkt, i, p, x_others);
  out.constrained_value = b * std::log(utility_with_bundle(mkt, i, x_others, constrained) + cfg.eps_u);

  // Start from an equal-spending bundle, then ascend on the orthant only.
  Allocation x = x_others;
  for (std::size_t j = 0; j < m; ++j) x(i, j) = b / (static_cast<double>(m) * p[j]);
  for (int s = 0; s < cfg.steps; ++s) {
    const Bundle g = log_utility_grad(mkt, i, x, cfg.eps_u);
    for (std::size_t j = 0; j < m; ++j) x(i, j) = std::max(x(i, j) + cfg.eta * (g[j] - p[j]), 0.0);
  }
  const auto row = x.row(i);
  out.penalized_argmax.assign(row.begin(), row.end());
  out.penalized_value = penalized_objective(mkt, i, row, x_others, p, cfg.eps_u);
  out.gap = std::abs(out.constrained_value - out.penalized_value);
  return out;
}

}  // namespace infmarket
