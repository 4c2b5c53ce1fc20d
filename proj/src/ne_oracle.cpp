#include "ne_oracle.hpp"

#include <algorithm>

#include "best_response.hpp"
#include "projections.hpp"

namespace infmarket {

Bundle ascent_direction(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                        AscentGradient kind, double eps_u) {
  return kind == AscentGradient::LogUtility ? log_utility_grad(mkt, i, x, eps_u)
                                            : utility_grad(mkt, i, x, eps_u);
}

namespace {

// One synchronous projected step: out_i = Pi_i(base_i + eta * g_i(at)).
void projected_step(const MarketInstance& mkt, std::span<const double> p, const Allocation& base,
                    const Allocation& at, const NeOracleConfig& cfg, Allocation& out) {
  const std::size_t m = mkt.goods();
  Bundle y(m);
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const Bundle g = ascent_direction(mkt, i, at, cfg.gradient, cfg.eps_u);
    for (std::size_t j = 0; j < m; ++j) y[j] = base(i, j) + cfg.eta_x * g[j];
    const auto next = project_budget(y, BudgetSet{p, mkt.budget(i)});
    std::copy(next.begin(), next.end(), out.row(i).begin());
  }
}

}  // namespace

NeResult solve_ne(const MarketInstance& mkt, std::span<const double> p, const Allocation& x0,
                  const NeOracleConfig& cfg) {
  require_shape(mkt, x0);
  if (cfg.inner_iters < 1 || !(cfg.eta_x > 0.0))
    throw Error(ErrorCode::InvalidArgument, "oracle needs inner_iters >= 1 and eta_x > 0");

  NeResult res;
  res.x = Allocation(mkt.buyers(), mkt.goods());
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const auto row = project_budget(x0.row(i), BudgetSet{p, mkt.budget(i)});
    std::copy(row.begin(), row.end(), res.x.row(i).begin());
  }
  Allocation half(mkt.buyers(), mkt.goods());
  Allocation next(mkt.buyers(), mkt.goods());
  const int check_every = std::max(cfg.check_every, 1);
  for (int s = 1; s <= cfg.inner_iters; ++s) {
    projected_step(mkt, p, res.x, res.x, cfg, half);
    projected_step(mkt, p, res.x, half, cfg, next);
    std::swap(res.x, next);
    res.iterations = s;
    if (cfg.delta > 0.0 && s % check_every == 0 && exploitability(mkt, p, res.x) <= cfg.delta)
      break;
  }
  res.exploitability = exploitability(mkt, p, res.x);
  return res;
}

double exploitability(const MarketInstance& mkt, std::span<const double> p, const Allocation& x,
                      double eps_p) {
  require_shape(mkt, x);
  PriceVector floored(p.begin(), p.end());
  for (double& v : floored) v = std::max(v, eps_p);
  double gap = 0.0;
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const Bundle br = best_response_closed(mkt, i, floored, x);
    gap = std::max(gap, utility_with_bundle(mkt, i, x, br) - utility(mkt, i, x));
  }
  return gap;
}

}  // namespace infmarket
