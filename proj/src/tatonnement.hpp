#pragma once

#include <iosfwd>
#include <vector>

#include "market.hpp"
#include "ne_oracle.hpp"

namespace infmarket {

struct TatonnementConfig {
  int outer_iters = 400;
  double eta_p = 8.0;
  NeOracleConfig oracle;
  /// Price floor used when evaluating demand; negative selects the default
  /// 1e-3 * (sum of budgets) / m.
  double eps_p = -1.0;
  int record_every = 1;
};

struct TrajectoryRecord {
  int t = 0;
  PriceVector prices;
  double obj_sum = 0.0;
  std::vector<double> obj_buyer;
  double exploitability = 0.0;
  double walras_residual = 0.0;
  double feas_violation = 0.0;
  std::vector<double> excess;  ///< z(x^(t)); not written to CSV
};

struct SolverTrajectory {
  std::vector<TrajectoryRecord> records;

  void write_csv(std::ostream& os) const;
};

struct TatonnementResult {
  Allocation x;
  PriceVector p;
  SolverTrajectory trajectory;
};

double default_price_floor(const MarketInstance& mkt);
/// Uniform prices summing to the total budget.
PriceVector default_initial_prices(const MarketInstance& mkt);
/// Each buyer's best response ignoring influence, at prices floored by eps_p.
Allocation default_initial_allocation(const MarketInstance& mkt, std::span<const double> p0,
                                      double eps_p);

/// Projected subgradient descent on the auctioneers' value function with an
/// extragradient NE oracle for demand. The returned allocation is the
/// oracle's answer at the returned prices.
TatonnementResult run_tatonnement(const MarketInstance& mkt, std::span<const double> p0,
                                  const Allocation& x0, const TatonnementConfig& cfg);
TatonnementResult run_tatonnement(const MarketInstance& mkt, const TatonnementConfig& cfg);

/// f_i(x_i, p) = sum_j p_j (1 - sum_{k != i} x_kj) + b_i log(u_i + eps_u).
double objective(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                 std::span<const double> p, double eps_u = kDefaultEpsU);

/// 1 - sum_i x_i, shared by every auctioneer.
std::vector<double> value_function_subgradient(const Allocation& x_star);

/// Auctioneer i's value at prices p, with the other buyers held at x_star:
/// sum_j p_j (1 - sum_{k != i} x*_kj) + max over buyer i's budget set of
/// b_i log(u_i(x_i, x*_{N_i}) + eps_u). Its gradient at the prices x_star was
/// computed for is 1 - sum_i x*_i.
double value_function(const MarketInstance& mkt, std::size_t i, std::span<const double> p,
                      const Allocation& x_star, double eps_u = kDefaultEpsU);

}  // namespace infmarket
