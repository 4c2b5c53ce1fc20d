#include "equilibrium_check.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <limits>

#include "best_response.hpp"
#include "ne_oracle.hpp"
#include "tatonnement.hpp"

namespace infmarket {

Tolerances Tolerances::uniform(double tau) {
  return Tolerances{tau, tau, tau, tau, tau, tau, tau};
}

Tolerances default_tolerances(const MarketInstance& mkt, std::span<const double> p) {
  const double total = mkt.total_budget();
  const auto budgets = mkt.budgets();
  const double min_budget = *std::min_element(budgets.begin(), budgets.end());

  PriceVector floored(p.begin(), p.end());
  for (double& v : floored) v = std::max(v, default_price_floor(mkt));
  // Utility scale: best responses against a profile of those same responses.
  Allocation responses(mkt.buyers(), mkt.goods());
  const MarketInstance plain(mkt.family(), {budgets.begin(), budgets.end()}, mkt.valuations(), {});
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const Bundle br = best_response_closed(plain, i, floored, responses);
    std::copy(br.begin(), br.end(), responses.row(i).begin());
  }
  double u_scale = 0.0;
  for (std::size_t i = 0; i < mkt.buyers(); ++i)
    u_scale = std::max(u_scale, utility(mkt, i, responses));

  Tolerances tol;
  tol.walras = 1e-2 * total;
  tol.budget = 1e-6 * min_budget;
  tol.budget_slack = 1e-2 * min_budget;
  tol.br_gap = 1e-2 * u_scale;
  tol.price_sum = 1e-2 * total;
  tol.auctioneer = 1e-2 * total;
  return tol;
}

namespace {

EquilibriumCertificate evaluate(const MarketInstance& mkt, const Allocation& x,
                                std::span<const double> p, const Tolerances& tol, double eps_p) {
  require_shape(mkt, x);
  if (p.size() != mkt.goods())
    throw Error(ErrorCode::InvalidArgument, "price vector has wrong length");
  if (eps_p < 0.0) eps_p = default_price_floor(mkt);

  EquilibriumCertificate c;
  c.tolerances = tol;
  const std::vector<double> z = excess_demand(x);
  for (double zj : z) c.feasibility_violation = std::max(c.feasibility_violation, zj);
  c.walras_residual = std::abs(dot(p, z));

  c.budget_slack = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < mkt.buyers(); ++i) {
    const double spent = dot(x.row(i), p);
    c.budget_violation = std::max(c.budget_violation, spent - mkt.budget(i));
    c.budget_slack = std::max(c.budget_slack, mkt.budget(i) - spent);
  }
  c.br_gap = exploitability(mkt, p, x, eps_p);

  double price_sum = 0.0;
  for (double v : p) price_sum += v;
  c.price_sum_gap = std::abs(price_sum - mkt.total_budget());
  const double z_max = *std::max_element(z.begin(), z.end());
  c.auctioneer_gap = std::max(0.0, mkt.total_budget() * z_max - dot(p, z));

  Verdict& v = c.verdict;
  v.feasibility = c.feasibility_violation <= tol.feasibility;
  v.walras = c.walras_residual <= tol.walras;
  v.budget = c.budget_violation <= tol.budget;
  // Leontief buyers may saturate below their budget.
  v.budget_slack = mkt.family() == Family::Leontief || c.budget_slack <= tol.budget_slack;
  v.br_gap = c.br_gap <= tol.br_gap;
  v.pass = v.feasibility && v.walras && v.budget && v.budget_slack && v.br_gap;
  return c;
}

}  // namespace

EquilibriumCertificate check_ce(const MarketInstance& mkt, const Allocation& x,
                                std::span<const double> p, const Tolerances& tol, double eps_p) {
  return evaluate(mkt, x, p, tol, eps_p);
}

EquilibriumCertificate check_gne(const MarketInstance& mkt, const Allocation& x,
                                 std::span<const double> p, const Tolerances& tol, double eps_p) {
  EquilibriumCertificate c = evaluate(mkt, x, p, tol, eps_p);
  c.kind = EquilibriumCertificate::Kind::GeneralizedNash;
  c.verdict.price_sum = c.price_sum_gap <= tol.price_sum;
  c.verdict.auctioneer = c.auctioneer_gap <= tol.auctioneer;
  c.verdict.pass = c.verdict.pass && c.verdict.price_sum && c.verdict.auctioneer;
  return c;
}

std::string EquilibriumCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = kind == Kind::GeneralizedNash ? "gne" : "ce";
  j["feasibility_violation"] = feasibility_violation;
  j["walras_residual"] = walras_residual;
  j["budget_violation"] = budget_violation;
  j["budget_slack"] = budget_slack;
  j["br_gap"] = br_gap;
  j["price_sum_gap"] = price_sum_gap;
  j["auctioneer_gap"] = auctioneer_gap;
  j["tolerances"] = {{"feasibility", tolerances.feasibility},
                     {"walras", tolerances.walras},
                     {"budget", tolerances.budget},
                     {"budget_slack", tolerances.budget_slack},
                     {"br_gap", tolerances.br_gap},
                     {"price_sum", tolerances.price_sum},
                     {"auctioneer", tolerances.auctioneer}};
  j["verdict"] = {{"feasibility", verdict.feasibility},
                  {"walras", verdict.walras},
                  {"budget", verdict.budget},
                  {"budget_slack", verdict.budget_slack},
                  {"br_gap", verdict.br_gap},
                  {"price_sum", verdict.price_sum},
                  {"auctioneer", verdict.auctioneer},
                  {"pass", verdict.pass}};
  return j.dump(2);
}

}  // namespace infmarket
