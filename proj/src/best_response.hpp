#pragma once

#include "market.hpp"

namespace infmarket {

/// Closed-form maximizer of u_i(., x_{N_i}) over buyer i's budget set.
/// Requires strictly positive prices for the Linear and Cobb-Douglas
/// families (throws ErrorCode::UnboundedBestResponse otherwise).
Bundle best_response_closed(const MarketInstance& mkt, std::size_t i, std::span<const double> p,
                            const Allocation& x_others);

/// Projected gradient ascent on b_i log(u_i + eps_u) over the budget set,
/// started from `start` (or a zero bundle if empty).
Bundle best_response_iterative(const MarketInstance& mkt, std::size_t i,
                               std::span<const double> p, const Allocation& x_others, int steps,
                               double eta, std::span<const double> start = {},
                               double eps_u = kDefaultEpsU);

/// Replaces row i of `x` with `bundle` and returns buyer i's utility there.
double utility_with_bundle(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                           std::span<const double> bundle);

}  // namespace infmarket
