#pragma once

#include <span>
#include <vector>

#include "market.hpp"

namespace infmarket {

/// The budget set {x >= 0 : x . prices <= budget}.
struct BudgetSet {
  std::span<const double> prices;
  double budget;
};

std::vector<double> project_nonneg(std::span<const double> y);

/// Euclidean projection onto a budget set. Finds the multiplier of the
/// budget constraint by bisection; the result spends the budget to within
/// 1e-10 relative whenever the clipped point is infeasible.
std::vector<double> project_budget(std::span<const double> y, const BudgetSet& set);

/// Projection of the n demands for one good onto {z >= 0 : sum z <= 1}.
std::vector<double> project_capped_simplex(std::span<const double> y);

/// Column-wise projection onto the joint supply set {X >= 0 : sum_i x_ij <= 1}.
Allocation project_supply(const Allocation& x);

}  // namespace infmarket
