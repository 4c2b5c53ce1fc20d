#pragma once

#include "market.hpp"

namespace infmarket {

/// b_i log(u_i(x_i, x_{N_i}) + eps_u) + b_i - x_i . p: the budget constraint
/// replaced by a unit-multiplier penalty.
double penalized_objective(const MarketInstance& mkt, std::size_t i, std::span<const double> x_i,
                           const Allocation& x_others, std::span<const double> p,
                           double eps_u = kDefaultEpsU);

struct LambdaOneCheck {
  double constrained_value = 0.0;    ///< b_i log u_i at the budget-constrained optimum
  double penalized_value = 0.0;      ///< max over x_i >= 0 of the penalized objective
  double gap = 0.0;
  Bundle penalized_argmax;
};

struct LambdaOneConfig {
  int steps = 2000;
  double eta = 0.05;
  double eps_u = kDefaultEpsU;
};

/// Compares the budget-constrained optimum with the unconstrained maximum of
/// the penalized objective (projected gradient ascent on the orthant).
LambdaOneCheck verify_lambda_one(const MarketInstance& mkt, std::size_t i,
                                 const Allocation& x_others, std::span<const double> p,
                                 const LambdaOneConfig& cfg = {});

}  // namespace infmarket
