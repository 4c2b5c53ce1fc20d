#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "market_io.hpp"
#include "philox.hpp"

namespace infmarket {

namespace {

enum Stream : std::uint32_t { kBudgets = 0, kValuations = 1, kEdges = 2 };

std::string market_stem(std::uint64_t index) {
  std::ostringstream os;
  os << "market_" << std::setw(3) << std::setfill('0') << index;
  return os.str();
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return os;
}

bool finite_trajectory(const SolverTrajectory& tr) {
  for (const auto& r : tr.records) {
    if (!std::isfinite(r.obj_sum)) return false;
    for (double p : r.prices)
      if (!std::isfinite(p)) return false;
  }
  return true;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

TatonnementConfig paper_defaults(Family family) {
  TatonnementConfig cfg;
  cfg.outer_iters = 400;
  switch (family) {
    case Family::Linear:
      cfg.eta_p = 2.0;
      cfg.oracle.inner_iters = 100;
      cfg.oracle.eta_x = 0.2;
      break;
    case Family::CobbDouglas:
      cfg.eta_p = 8.0;
      cfg.oracle.inner_iters = 200;
      cfg.oracle.eta_x = 0.5;
      break;
    case Family::Leontief:
      cfg.eta_p = 5.0;
      cfg.oracle.inner_iters = 100;
      cfg.oracle.eta_x = 3.0;
      break;
  }
  return cfg;
}

MarketInstance generate_market(Family family, std::size_t buyers, std::size_t goods,
                               double edge_prob, std::uint64_t seed, std::uint64_t index) {
  if (buyers == 0 || goods == 0)
    throw Error(ErrorCode::InvalidArgument, "need at least one buyer and one good");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "edge probability must lie in [0, 1]");
  const auto sub = static_cast<std::uint32_t>(index);

  CounterStream budget_rng(seed, kBudgets, sub);
  std::vector<double> budgets(buyers);
  for (double& b : budgets) b = budget_rng.uniform(5.0, 15.0);

  CounterStream valuation_rng(seed, kValuations, sub);
  Matrix valuations(buyers, goods);
  for (double& v : valuations.data()) v = valuation_rng.uniform(5.0, 35.0);

  CounterStream edge_rng(seed, kEdges, sub);
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < buyers; ++k)
    for (std::size_t i = 0; i < buyers; ++i) {
      if (k == i) continue;
      if (edge_rng.uniform() < edge_prob) edges.push_back({k, i});
    }
  return MarketInstance(family, std::move(budgets), std::move(valuations), std::move(edges));
}

MarketInstance generate_market(const ExperimentConfig& cfg, std::uint64_t index) {
  return generate_market(cfg.family, cfg.buyers, cfg.goods, cfg.edge_prob, cfg.seed, index);
}

double fit_sqrt_reference(const std::vector<int>& t, const std::vector<double>& series,
                          int anchor) {
  if (series.empty()) return 0.0;
  auto it = std::find(t.begin(), t.end(), anchor);
  if (it == t.end()) it = t.begin();
  const std::size_t k = static_cast<std::size_t>(it - t.begin());
  return std::abs(series[k] - series.back()) * std::sqrt(static_cast<double>(t[k]));
}

std::vector<double> ExperimentSummary::residual() const {
  std::vector<double> r(obj_mean.size());
  for (std::size_t k = 0; k < obj_mean.size(); ++k) r[k] = std::abs(obj_mean[k] - obj_mean.back());
  return r;
}

ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.num_markets < 1) throw Error(ErrorCode::InvalidArgument, "num_markets must be >= 1");
  if (!(cfg.edge_prob >= 0.0 && cfg.edge_prob <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "edge probability must lie in [0, 1]");

  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir / "markets", ec);
    std::filesystem::create_directories(cfg.out_dir / "trajectories", ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + cfg.out_dir.string() + "': " + ec.message());
  }

  ExperimentSummary summary;
  summary.markets.resize(static_cast<std::size_t>(cfg.num_markets));

  // Each worker owns whole markets; outcomes land in their own slots.
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < summary.markets.size(); k = next++) {
      MarketOutcome& out = summary.markets[k];
      out.index = k;
      try {
        const MarketInstance mkt = generate_market(cfg, k);
        TatonnementResult res = run_tatonnement(mkt, cfg.solver);
        out.trajectory = std::move(res.trajectory);
        out.certificate = check_ce(mkt, res.x, res.p, default_tolerances(mkt, res.p));
        out.solved = finite_trajectory(out.trajectory);
        if (!out.solved) out.error = "non-finite trajectory";
      } catch (const std::exception& e) {
        out.solved = false;
        out.error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }

  // Sequential reduce in market order.
  std::size_t solved = 0;
  std::size_t passed = 0;
  for (const auto& out : summary.markets) {
    if (!out.solved) continue;
    ++solved;
    if (out.certificate.verdict.pass) ++passed;
    if (summary.t.empty()) {
      for (const auto& r : out.trajectory.records) summary.t.push_back(r.t);
      summary.obj_mean.assign(summary.t.size(), 0.0);
    }
    for (std::size_t k = 0; k < summary.t.size(); ++k)
      summary.obj_mean[k] += out.trajectory.records[k].obj_sum;
  }
  for (double& v : summary.obj_mean) v /= static_cast<double>(std::max<std::size_t>(solved, 1));
  summary.pass_rate = static_cast<double>(passed) / static_cast<double>(summary.markets.size());
  summary.reference_constant = fit_sqrt_reference(summary.t, summary.obj_mean);
  for (int t : summary.t)
    summary.reference.push_back(summary.reference_constant / std::sqrt(static_cast<double>(t)));

  if (cfg.out_dir.empty()) return summary;

  for (const auto& out : summary.markets) {
    const std::string stem = market_stem(out.index);
    save_market(generate_market(cfg, out.index), cfg.out_dir / "markets" / (stem + ".json"));
    auto os = open_for_write(cfg.out_dir / "trajectories" / (stem + ".csv"));
    out.trajectory.write_csv(os);
  }
  {
    auto os = open_for_write(cfg.out_dir / "aggregate.csv");
    os << std::setprecision(17) << "t,obj_mean,ref_sqrt\n";
    for (std::size_t k = 0; k < summary.t.size(); ++k)
      os << summary.t[k] << ',' << summary.obj_mean[k] << ',' << summary.reference[k] << '\n';
  }

  nlohmann::ordered_json j;
  j["family"] = std::string(family_name(cfg.family));
  j["buyers"] = cfg.buyers;
  j["goods"] = cfg.goods;
  j["num_markets"] = cfg.num_markets;
  j["seed"] = cfg.seed;
  j["edge_prob"] = cfg.edge_prob;
  j["solver"] = {{"outer_iters", cfg.solver.outer_iters},
                 {"eta_price", cfg.solver.eta_p},
                 {"inner_iters", cfg.solver.oracle.inner_iters},
                 {"eta_alloc", cfg.solver.oracle.eta_x},
                 {"delta", cfg.solver.oracle.delta}};
  j["pass_rate"] = summary.pass_rate;
  j["reference_constant"] = summary.reference_constant;

  auto rate = [&](auto pick) {
    std::size_t c = 0;
    for (const auto& out : summary.markets)
      if (out.solved && pick(out.certificate.verdict)) ++c;
    return static_cast<double>(c) / static_cast<double>(summary.markets.size());
  };
  j["component_pass_rates"] = {
      {"feasibility", rate([](const Verdict& v) { return v.feasibility; })},
      {"walras", rate([](const Verdict& v) { return v.walras; })},
      {"budget", rate([](const Verdict& v) { return v.budget; })},
      {"budget_slack", rate([](const Verdict& v) { return v.budget_slack; })},
      {"br_gap", rate([](const Verdict& v) { return v.br_gap; })}};

  auto quantiles = [&](auto pick) {
    std::vector<double> vals;
    for (const auto& out : summary.markets)
      if (out.solved) vals.push_back(pick(out.certificate));
    return nlohmann::ordered_json{{"median", quantile(vals, 0.5)},
                                  {"p90", quantile(vals, 0.9)},
                                  {"max", quantile(vals, 1.0)}};
  };
  using Cert = EquilibriumCertificate;
  j["residual_quantiles"] = {
      {"feasibility_violation", quantiles([](const Cert& c) { return c.feasibility_violation; })},
      {"walras_residual", quantiles([](const Cert& c) { return c.walras_residual; })},
      {"budget_violation", quantiles([](const Cert& c) { return c.budget_violation; })},
      {"budget_slack", quantiles([](const Cert& c) { return c.budget_slack; })},
      {"br_gap", quantiles([](const Cert& c) { return c.br_gap; })}};

  nlohmann::ordered_json flagged = nlohmann::ordered_json::array();
  nlohmann::ordered_json per_market = nlohmann::ordered_json::array();
  for (const auto& out : summary.markets) {
    if (!out.solved) flagged.push_back({{"index", out.index}, {"error", out.error}});
    per_market.push_back({{"index", out.index},
                          {"solved", out.solved},
                          {"pass", out.solved && out.certificate.verdict.pass},
                          {"certificate", nlohmann::ordered_json::parse(out.certificate.to_json())}});
  }
  j["flagged"] = flagged;
  j["markets"] = per_market;

  auto os = open_for_write(cfg.out_dir / "summary.json");
  os << j.dump(2) << '\n';
  return summary;
}

}  // namespace infmarket
