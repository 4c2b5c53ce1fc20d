#pragma once

#include <vector>

#include "market.hpp"

namespace infmarket {

struct ViConfig {
  int iters = 20000;
  /// Largest extragradient step. The step is halved whenever the local
  /// Lipschitz test eta * |F(x) - F(x_half)| <= 0.9 |x - x_half| fails.
  double eta = 1.0;
  double eps_u = kDefaultEpsU;
  double support_threshold = 1e-3;
  /// Stop once the natural residual |x - x_half| / eta drops below this.
  double residual_tol = 1e-10;
};

struct ViResult {
  Allocation x;
  int iterations = 0;
  double residual = 0.0;
  /// Set for Linear and Leontief markets, whose joint operator is not
  /// guaranteed to be monotone.
  bool best_effort = false;
};

/// Extragradient on F(X) = (grad_{x_i} b_i log(u_i + eps_u))_i over the joint
/// supply set {X >= 0 : sum_i x_ij <= 1}.
ViResult solve_ve(const MarketInstance& mkt, const Allocation& x0, const ViConfig& cfg);

struct PriceRecovery {
  PriceVector prices;
  std::vector<double> spread;              ///< max - min of the per-buyer estimates
  std::vector<std::size_t> unpriced_goods; ///< goods with no supporting buyer (price 0)
};

/// Per-good median over supporting buyers (x_ij > tau) of
/// b_i (du_i/dx_ij) / (u_i + eps_u). Throws ErrorCode::UnpricedGood when some
/// good has no supporting buyer.
PriceRecovery recover_prices(const MarketInstance& mkt, const Allocation& x, const ViConfig& cfg);

/// As recover_prices, but unsupported goods get price 0 and are listed.
PriceRecovery recover_prices_or_zero(const MarketInstance& mkt, const Allocation& x,
                                     const ViConfig& cfg);

/// Uniform split of every good: x_ij = 1/n.
Allocation default_vi_start(const MarketInstance& mkt);

}  // namespace infmarket
