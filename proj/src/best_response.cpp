#include "best_response.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "projections.hpp"

namespace infmarket {

Bundle best_response_closed(const MarketInstance& mkt, std::size_t i, std::span<const double> p,
                            const Allocation& x_others) {
  if (i >= mkt.buyers()) throw std::out_of_range("buyer index out of range");
  require_shape(mkt, x_others);
  const std::size_t m = mkt.goods();
  if (p.size() != m) throw Error(ErrorCode::InvalidArgument, "price vector has wrong length");
  const double b = mkt.budget(i);
  const auto v = mkt.valuation(i);
  Bundle x(m, 0.0);

  if (mkt.family() != Family::Leontief) {
    for (double pj : p)
      if (!(pj > 0.0))
        throw Error(ErrorCode::UnboundedBestResponse,
                    "best response is unbounded at a zero price");
  }

  switch (mkt.family()) {
    case Family::Linear: {
      std::size_t best = 0;
      for (std::size_t j = 1; j < m; ++j)
        if (v[j] / p[j] > v[best] / p[best]) best = j;
      x[best] = b / p[best];
      break;
    }
    case Family::CobbDouglas:
      for (std::size_t j = 0; j < m; ++j) x[j] = v[j] * b / p[j];
      break;
    case Family::Leontief: {
      double cap = std::numeric_limits<double>::infinity();
      for (std::size_t k : mkt.neighbors(i)) cap = std::min(cap, own_utility(mkt, k, x_others.row(k)));
      const double cost = dot(p, v);
      const double affordable = cost > 0.0 ? b / cost : std::numeric_limits<double>::infinity();
      const double t = std::min(cap, affordable);
      if (!std::isfinite(t))
        throw Error(ErrorCode::UnboundedBestResponse, "Leontief bundle is free and uncapped");
      for (std::size_t j = 0; j < m; ++j) x[j] = t * v[j];
      break;
    }
  }
  return x;
}

Bundle best_response_iterative(const MarketInstance& mkt, std::size_t i,
                               std::span<const double> p, const Allocation& x_others, int steps,
                               double eta, std::span<const double> start, double eps_u) {
  require_shape(mkt, x_others);
  const std::size_t m = mkt.goods();
  const BudgetSet set{p, mkt.budget(i)};
  Allocation x = x_others;
  {
    Bundle init = start.empty() ? Bundle(m, 0.0) : Bundle(start.begin(), start.end());
    const auto projected = project_budget(init, set);
    std::copy(projected.begin(), projected.end(), x.row(i).begin());
  }
  Bundle y(m);
  for (int s = 0; s < steps; ++s) {
    const Bundle g = log_utility_grad(mkt, i, x, eps_u);
    for (std::size_t j = 0; j < m; ++j) y[j] = x(i, j) + eta * g[j];
    const auto next = project_budget(y, set);
    std::copy(next.begin(), next.end(), x.row(i).begin());
  }
  const auto r = x.row(i);
  return Bundle(r.begin(), r.end());
}

double utility_with_bundle(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                           std::span<const double> bundle) {
  Allocation y = x;
  std::copy(bundle.begin(), bundle.end(), y.row(i).begin());
  return utility(mkt, i, y);
}

}  // namespace infmarket
