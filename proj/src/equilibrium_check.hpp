#pragma once

#include <string>

#include "market.hpp"

namespace infmarket {

/// Absolute thresholds for each certificate component.
struct Tolerances {
  double feasibility = 1e-3;
  double walras = 1e-2;
  double budget = 1e-6;
  double budget_slack = 1e-2;
  double br_gap = 1e-2;
  double price_sum = 1e-2;
  double auctioneer = 1e-2;

  static Tolerances uniform(double tau);
};

/// Defaults scaled to the market: Walras, price-sum and auctioneer 1e-2 * sum(b);
/// budget 1e-6 * min(b); slack 1e-2 * min(b); best-response gap 1e-2 times the
/// largest best-response utility at p.
Tolerances default_tolerances(const MarketInstance& mkt, std::span<const double> p);

struct Verdict {
  bool feasibility = false;
  bool walras = false;
  bool budget = false;
  bool budget_slack = false;
  bool br_gap = false;
  bool price_sum = true;
  bool auctioneer = true;
  bool pass = false;
};

struct EquilibriumCertificate {
  enum class Kind { CompetitiveEquilibrium, GeneralizedNash } kind = Kind::CompetitiveEquilibrium;
  double feasibility_violation = 0.0;
  double walras_residual = 0.0;
  double budget_violation = 0.0;
  double budget_slack = 0.0;  ///< signed, informational for Leontief
  double br_gap = 0.0;
  double price_sum_gap = 0.0;
  double auctioneer_gap = 0.0;
  Tolerances tolerances;
  Verdict verdict;

  std::string to_json() const;
};

EquilibriumCertificate check_ce(const MarketInstance& mkt, const Allocation& x,
                                std::span<const double> p, const Tolerances& tol,
                                double eps_p = -1.0);

/// Adds the auctioneer's conditions: prices on the scaled simplex
/// {p >= 0 : sum p = sum b} and p a best response to the excess demand.
EquilibriumCertificate check_gne(const MarketInstance& mkt, const Allocation& x,
                                 std::span<const double> p, const Tolerances& tol,
                                 double eps_p = -1.0);

}  // namespace infmarket
