#pragma once

#include "market.hpp"

namespace infmarket {

/// Ascent direction used by the inner extragradient loop.
enum class AscentGradient {
  Utility,     ///< grad_{x_i} u_i, as in the nested tatonnement listing.
  LogUtility,  ///< grad_{x_i} b_i log(u_i + eps_u).
};

struct NeOracleConfig {
  int inner_iters = 200;
  double eta_x = 0.5;
  double delta = 0.0;  ///< early exit once exploitability <= delta (0 disables)
  double eps_u = kDefaultEpsU;
  AscentGradient gradient = AscentGradient::Utility;
  int check_every = 10;
};

struct NeResult {
  Allocation x;
  int iterations = 0;
  double exploitability = 0.0;
};

/// Simultaneous extragradient ascent of all buyers, each projected onto its
/// own budget set at prices `p`. Every buyer reads the same previous iterate.
NeResult solve_ne(const MarketInstance& mkt, std::span<const double> p, const Allocation& x0,
                  const NeOracleConfig& cfg);

/// max_i [u_i(BR_i, x_{N_i}) - u_i(x_i, x_{N_i})], with best responses taken at
/// prices floored at `eps_p`.
double exploitability(const MarketInstance& mkt, std::span<const double> p, const Allocation& x,
                      double eps_p = 0.0);

Bundle ascent_direction(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                        AscentGradient kind, double eps_u);

}  // namespace infmarket
