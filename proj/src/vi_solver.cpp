#include "vi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "projections.hpp"

namespace infmarket {

namespace {

Matrix joint_operator(const MarketInstance& mkt, const Allocation& x, double eps_u) {
  Matrix f(mkt.buyers(), mkt.goods());
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const Bundle g = log_utility_grad(mkt, i, x, eps_u);
    std::copy(g.begin(), g.end(), f.row(i).begin());
  }
  return f;
}

Allocation step(const Allocation& x, const Matrix& f, double eta) {
  Allocation y = x;
  auto yd = y.data();
  const auto fd = f.data();
  for (std::size_t k = 0; k < yd.size(); ++k) yd[k] += eta * fd[k];
  return project_supply(y);
}

double distance(const Matrix& a, const Matrix& b) {
  double s = 0.0;
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t k = 0; k < ad.size(); ++k) s += (ad[k] - bd[k]) * (ad[k] - bd[k]);
  return std::sqrt(s);
}

}  // namespace

Allocation default_vi_start(const MarketInstance& mkt) {
  return Allocation(mkt.buyers(), mkt.goods(), 1.0 / static_cast<double>(mkt.buyers()));
}

ViResult solve_ve(const MarketInstance& mkt, const Allocation& x0, const ViConfig& cfg) {
  require_shape(mkt, x0);
  if (cfg.iters < 1 || !(cfg.eta > 0.0) || !(cfg.support_threshold > 0.0))
    throw Error(ErrorCode::InvalidArgument, "VI solver needs iters >= 1, eta > 0 and tau > 0");

  ViResult res;
  res.best_effort = mkt.family() != Family::CobbDouglas;
  res.x = project_supply(x0);
  double eta = cfg.eta;
  constexpr double kShrink = 0.5;
  constexpr double kGrow = 1.2;
  constexpr double kLipschitzRatio = 0.9;

  for (int it = 1; it <= cfg.iters; ++it) {
    const Matrix f = joint_operator(mkt, res.x, cfg.eps_u);
    Allocation half;
    Matrix f_half;
    double moved = 0.0;
    for (;;) {
      half = step(res.x, f, eta);
      f_half = joint_operator(mkt, half, cfg.eps_u);
      moved = distance(half, res.x);
      if (eta * distance(f_half, f) <= kLipschitzRatio * moved || eta < 1e-14) break;
      eta *= kShrink;
    }
    res.x = step(res.x, f_half, eta);
    res.iterations = it;
    res.residual = moved / eta;
    if (res.residual <= cfg.residual_tol) break;
    eta = std::min(eta * kGrow, cfg.eta);
  }
  return res;
}

PriceRecovery recover_prices_or_zero(const MarketInstance& mkt, const Allocation& x,
                                     const ViConfig& cfg) {
  require_shape(mkt, x);
  const std::size_t m = mkt.goods();
  PriceRecovery out;
  out.prices.assign(m, 0.0);
  out.spread.assign(m, 0.0);

  std::vector<Bundle> grads(mkt.buyers());
  std::vector<double> utils(mkt.buyers());
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    grads[i] = utility_grad(mkt, i, x, cfg.eps_u);
    utils[i] = utility(mkt, i, x);
  }

  std::vector<double> estimates;
  for (std::size_t j = 0; j < m; ++j) {
    estimates.clear();
    for (std::size_t i = 0; i < mkt.buyers(); ++i)
      if (x(i, j) > cfg.support_threshold)
        estimates.push_back(mkt.budget(i) * grads[i][j] / (utils[i] + cfg.eps_u));
    if (estimates.empty()) {
      out.unpriced_goods.push_back(j);
      continue;
    }
    std::sort(estimates.begin(), estimates.end());
    const std::size_t h = estimates.size() / 2;
    out.prices[j] = estimates.size() % 2 ? estimates[h] : 0.5 * (estimates[h - 1] + estimates[h]);
    out.spread[j] = estimates.back() - estimates.front();
  }
  return out;
}

PriceRecovery recover_prices(const MarketInstance& mkt, const Allocation& x, const ViConfig& cfg) {
  PriceRecovery out = recover_prices_or_zero(mkt, x, cfg);
  if (!out.unpriced_goods.empty()) {
    std::ostringstream os;
    os << "good " << out.unpriced_goods.front() << " has no buyer above the support threshold";
    throw Error(ErrorCode::UnpricedGood, os.str());
  }
  return out;
}

}  // namespace infmarket
