#include "tatonnement.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "best_response.hpp"
#include "projections.hpp"

namespace infmarket {

double default_price_floor(const MarketInstance& mkt) {
  return 1e-3 * mkt.total_budget() / static_cast<double>(mkt.goods());
}

PriceVector default_initial_prices(const MarketInstance& mkt) {
  return PriceVector(mkt.goods(), mkt.total_budget() / static_cast<double>(mkt.goods()));
}

namespace {

PriceVector floor_prices(std::span<const double> p, double eps_p) {
  PriceVector out(p.begin(), p.end());
  for (double& v : out) v = std::max(v, eps_p);
  return out;
}

MarketInstance without_edges(const MarketInstance& mkt) {
  return MarketInstance(mkt.family(), {mkt.budgets().begin(), mkt.budgets().end()},
                        mkt.valuations(), {});
}

}  // namespace

Allocation default_initial_allocation(const MarketInstance& mkt, std::span<const double> p0,
                                      double eps_p) {
  const PriceVector p = floor_prices(p0, eps_p);
  const MarketInstance plain = without_edges(mkt);
  Allocation x(mkt.buyers(), mkt.goods());
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const Bundle br = best_response_closed(plain, i, p, x);
    const auto row = project_budget(br, BudgetSet{p, mkt.budget(i)});
    std::copy(row.begin(), row.end(), x.row(i).begin());
  }
  return x;
}

double objective(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                 std::span<const double> p, double eps_u) {
  require_shape(mkt, x);
  double value = 0.0;
  for (std::size_t j = 0; j < mkt.goods(); ++j) {
    double others = 0.0;
    for (std::size_t k = 0; k < mkt.buyers(); ++k)
      if (k != i) others += x(k, j);
    value += p[j] * (1.0 - others);
  }
  return value + mkt.budget(i) * std::log(utility(mkt, i, x) + eps_u);
}

std::vector<double> value_function_subgradient(const Allocation& x_star) {
  std::vector<double> g = excess_demand(x_star);
  for (double& v : g) v = -v;
  return g;
}

double value_function(const MarketInstance& mkt, std::size_t i, std::span<const double> p,
                      const Allocation& x_star, double eps_u) {
  require_shape(mkt, x_star);
  double value = 0.0;
  for (std::size_t j = 0; j < mkt.goods(); ++j) {
    double others = 0.0;
    for (std::size_t k = 0; k < mkt.buyers(); ++k)
      if (k != i) others += x_star(k, j);
    value += p[j] * (1.0 - others);
  }
  const Bundle br = best_response_closed(mkt, i, p, x_star);
  return value + mkt.budget(i) * std::log(utility_with_bundle(mkt, i, x_star, br) + eps_u);
}

void SolverTrajectory::write_csv(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  std::size_t n = 0;
  std::size_t m = 0;
  if (!records.empty()) {
    n = records.front().obj_buyer.size();
    m = records.front().prices.size();
  }
  os << "t,obj_sum";
  for (std::size_t i = 0; i < n; ++i) os << ",obj_buyer_" << i;
  os << ",exploitability,walras_residual,feas_violation";
  for (std::size_t j = 0; j < m; ++j) os << ",p_" << j;
  os << '\n';
  for (const auto& r : records) {
    os << r.t << ',' << r.obj_sum;
    for (double v : r.obj_buyer) os << ',' << v;
    os << ',' << r.exploitability << ',' << r.walras_residual << ',' << r.feas_violation;
    for (double v : r.prices) os << ',' << v;
    os << '\n';
  }
  os.precision(old_precision);
}

TatonnementResult run_tatonnement(const MarketInstance& mkt, std::span<const double> p0,
                                  const Allocation& x0, const TatonnementConfig& cfg) {
  require_shape(mkt, x0);
  if (p0.size() != mkt.goods())
    throw Error(ErrorCode::InvalidArgument, "initial price vector has wrong length");
  if (cfg.outer_iters < 1 || !(cfg.eta_p > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tatonnement needs outer_iters >= 1 and eta_p > 0");
  for (double v : p0)
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidArgument, "initial prices must be >= 0");

  const double eps_p = cfg.eps_p < 0.0 ? default_price_floor(mkt) : cfg.eps_p;
  const int record_every = std::max(cfg.record_every, 1);
  const std::size_t n = mkt.buyers();
  const std::size_t m = mkt.goods();

  TatonnementResult res;
  res.p.assign(p0.begin(), p0.end());
  res.x = x0;

  for (int t = 1; t <= cfg.outer_iters; ++t) {
    const PriceVector demand_prices = floor_prices(res.p, eps_p);
    NeResult ne = solve_ne(mkt, demand_prices, res.x, cfg.oracle);
    res.x = std::move(ne.x);

    const std::vector<double> z = excess_demand(res.x);
    for (std::size_t j = 0; j < m; ++j) res.p[j] = std::max(res.p[j] + cfg.eta_p * z[j], 0.0);

    if (t % record_every == 0 || t == cfg.outer_iters) {
      TrajectoryRecord rec;
      rec.t = t;
      rec.prices = res.p;
      rec.obj_buyer.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        rec.obj_buyer[i] = objective(mkt, i, res.x, res.p, cfg.oracle.eps_u);
        rec.obj_sum += rec.obj_buyer[i];
      }
      rec.exploitability = ne.exploitability;
      rec.walras_residual = std::abs(dot(res.p, z));
      for (double zj : z) rec.feas_violation = std::max(rec.feas_violation, zj);
      rec.excess = z;
      res.trajectory.records.push_back(std::move(rec));
    }
  }

  // Demand at the final prices, so that (x, p) is a consistent pair.
  res.x = solve_ne(mkt, floor_prices(res.p, eps_p), res.x, cfg.oracle).x;
  return res;
}

TatonnementResult run_tatonnement(const MarketInstance& mkt, const TatonnementConfig& cfg) {
  const double eps_p = cfg.eps_p < 0.0 ? default_price_floor(mkt) : cfg.eps_p;
  const PriceVector p0 = default_initial_prices(mkt);
  return run_tatonnement(mkt, p0, default_initial_allocation(mkt, p0, eps_p), cfg);
}

}  // namespace infmarket
