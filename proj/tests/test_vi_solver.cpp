#include <gtest/gtest.h>

#include "equilibrium_check.hpp"
#include "test_util.hpp"
#include "vi_solver.hpp"

using namespace infmarket;
using infmarket::fx::mat;

TEST(SolveVe, SingleBuyerTakesEverything) {
  for (Family f : {Family::Linear, Family::CobbDouglas, Family::Leontief}) {
    const MarketInstance mkt(f, {10}, mat(1, 1, {1}), {});
    const auto r = solve_ve(mkt, default_vi_start(mkt), ViConfig{});
    EXPECT_NEAR(r.x(0, 0), 1.0, 1e-3) << family_name(f);
    EXPECT_EQ(r.best_effort, f != Family::CobbDouglas);
  }
}

TEST(SolveVe, SymmetricCobbDouglas) {
  const MarketInstance mkt(Family::CobbDouglas, {10, 10}, mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {});
  const auto r = solve_ve(mkt, mat(2, 2, {0.9, 0.1, 0.2, 0.7}), ViConfig{});
  for (double v : r.x.data()) EXPECT_NEAR(v, 0.5, 1e-2);
  const auto pr = recover_prices(mkt, r.x, ViConfig{});
  EXPECT_NEAR(pr.prices[0], 10.0, 1e-2);
  EXPECT_NEAR(pr.prices[1], 10.0, 1e-2);
}

TEST(SolveVe, BiasedCobbDouglasPrices) {
  const MarketInstance mkt(Family::CobbDouglas, {10, 10}, mat(2, 2, {0.9, 0.1, 0.1, 0.9}), {});
  const auto r = solve_ve(mkt, default_vi_start(mkt), ViConfig{});
  EXPECT_NEAR(r.x(0, 0), 0.9, 1e-2);
  EXPECT_NEAR(r.x(1, 1), 0.9, 1e-2);
  const auto pr = recover_prices(mkt, r.x, ViConfig{});
  EXPECT_NEAR(pr.prices[0], 10.0, 1e-2);
  EXPECT_NEAR(pr.prices[1], 10.0, 1e-2);
}

TEST(SolveVe, IteratesFeasible) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mkt = fx::random_market(rng, Family::CobbDouglas, 3, 3);
    ViConfig cfg;
    Allocation x = fx::random_matrix(rng, 3, 3, -0.5, 1.5);
    for (int k = 0; k < 30; ++k) {
      cfg.iters = 1;
      x = solve_ve(mkt, x, cfg).x;
      for (std::size_t j = 0; j < 3; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          EXPECT_GE(x(i, j), 0.0);
          s += x(i, j);
        }
        EXPECT_LE(s, 1.0 + 1e-9);
      }
    }
  }
}

TEST(SolveVe, RejectsBadConfig) {
  const MarketInstance mkt(Family::Linear, {1}, mat(1, 1, {1}), {});
  ViConfig cfg;
  cfg.iters = 0;
  EXPECT_THROW(solve_ve(mkt, Matrix(1, 1), cfg), Error);
  cfg = ViConfig{};
  cfg.support_threshold = 0.0;
  EXPECT_THROW(solve_ve(mkt, Matrix(1, 1), cfg), Error);
}

TEST(RecoverPrices, OneByOne) {
  const MarketInstance mkt(Family::CobbDouglas, {10}, mat(1, 1, {1}), {});
  const auto pr = recover_prices(mkt, mat(1, 1, {1}), ViConfig{});
  EXPECT_NEAR(pr.prices[0], 10.0, 1e-6);
  EXPECT_EQ(pr.spread[0], 0.0);
}

TEST(RecoverPrices, UnpricedGood) {
  const MarketInstance mkt(Family::CobbDouglas, {10, 10}, mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {});
  const Allocation x = mat(2, 2, {0.5, 0.0, 0.5, 1e-4});
  try {
    recover_prices(mkt, x, ViConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnpricedGood);
  }
  const auto pr = recover_prices_or_zero(mkt, x, ViConfig{});
  EXPECT_EQ(pr.prices[1], 0.0);
  EXPECT_EQ(pr.unpriced_goods, std::vector<std::size_t>{1});
}

TEST(VeProperties, CobbDouglasInfluenceMarkets) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mkt = fx::random_market(rng, Family::CobbDouglas, 3, 3);
    const auto r = solve_ve(mkt, default_vi_start(mkt), ViConfig{});
    const auto pr = recover_prices(mkt, r.x, ViConfig{});
    // Multipliers agree across buyers.
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(pr.spread[j], 1e-2 * pr.prices[j]);
    // Budget identity.
    for (std::size_t i = 0; i < 3; ++i)
      EXPECT_NEAR(dot(r.x.row(i), pr.prices), mkt.budget(i), 1e-2 * mkt.budget(i));
    // The pair is a certified competitive equilibrium.
    const auto cert = check_ce(mkt, r.x, pr.prices, default_tolerances(mkt, pr.prices));
    EXPECT_TRUE(cert.verdict.pass) << "trial " << trial << "\n" << cert.to_json();
    // Influence does not move Cobb-Douglas equilibrium prices.
    const auto closed = fx::cd_closed_form_prices(mkt);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(pr.prices[j], closed[j], 1e-2 * closed[j]);
  }
}
