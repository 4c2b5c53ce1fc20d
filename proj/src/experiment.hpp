#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "equilibrium_check.hpp"
#include "market.hpp"
#include "tatonnement.hpp"

namespace infmarket {

struct ExperimentConfig {
  Family family = Family::CobbDouglas;
  std::size_t buyers = 3;
  std::size_t goods = 3;
  int num_markets = 50;
  std::uint64_t seed = 0;
  double edge_prob = 0.5;
  TatonnementConfig solver;
  std::filesystem::path out_dir;
  unsigned threads = 1;
};

/// Outer/inner iteration counts and learning rates used in the published
/// experiments for each utility family.
TatonnementConfig paper_defaults(Family family);

/// Random market: budgets ~ U[5,15], valuations ~ U[5,35], each ordered
/// pair (k, i), k != i, an edge with probability edge_prob. Deterministic in
/// (seed, index) and independent of every other index.
MarketInstance generate_market(Family family, std::size_t buyers, std::size_t goods,
                               double edge_prob, std::uint64_t seed, std::uint64_t index);
MarketInstance generate_market(const ExperimentConfig& cfg, std::uint64_t index);

struct MarketOutcome {
  std::uint64_t index = 0;
  bool solved = false;  ///< false when the solver threw or produced non-finite output
  std::string error;
  EquilibriumCertificate certificate;
  SolverTrajectory trajectory;
};

struct ExperimentSummary {
  std::vector<MarketOutcome> markets;
  std::vector<int> t;
  std::vector<double> obj_mean;
  std::vector<double> reference;  ///< C / sqrt(t), anchored at t = 20
  double reference_constant = 0.0;
  double pass_rate = 0.0;

  /// |obj_mean(t) - obj_mean(T)|.
  std::vector<double> residual() const;
};

/// Solves every market, aggregates the mean objective per recorded iteration
/// and, if out_dir is set, writes per-market trajectories, aggregate.csv and
/// summary.json there.
ExperimentSummary run_experiment(const ExperimentConfig& cfg);

/// C such that C / sqrt(anchor) equals |series(anchor) - series(last)|.
double fit_sqrt_reference(const std::vector<int>& t, const std::vector<double>& series,
                          int anchor = 20);

}  // namespace infmarket
