#include <gtest/gtest.h>

#include <filesystem>

#include "market_io.hpp"
#include "test_util.hpp"

using namespace infmarket;
using infmarket::fx::mat;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    market_from_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(MarketIo, RoundTrip) {
  std::mt19937_64 rng(5);
  for (Family f : {Family::Linear, Family::CobbDouglas, Family::Leontief}) {
    const auto mkt = fx::random_market(rng, f, 3, 2);
    const auto back = market_from_json(market_to_json(mkt));
    EXPECT_EQ(back.family(), mkt.family());
    EXPECT_EQ(back.edges(), mkt.edges());
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(back.budget(i), mkt.budget(i));
    for (std::size_t k = 0; k < 6; ++k)
      EXPECT_NEAR(back.valuations().data()[k], mkt.valuations().data()[k], 1e-15);
  }
}

TEST(MarketIo, ParsesExample) {
  const auto mkt = market_from_json(R"({"n": 2, "m": 2, "family": "cobb-douglas",
      "budgets": [10, 10], "valuations": [[1, 3], [0.5, 0.5]], "edges": [[0, 1]]})");
  EXPECT_EQ(mkt.family(), Family::CobbDouglas);
  EXPECT_DOUBLE_EQ(mkt.valuations()(0, 1), 0.75);
  EXPECT_EQ(mkt.neighbors(1), std::vector<std::size_t>{0});
}

TEST(MarketIo, EdgesOptional) {
  const auto mkt = market_from_json(
      R"({"n": 1, "m": 1, "family": "linear", "budgets": [1], "valuations": [[2]]})");
  EXPECT_TRUE(mkt.edges().empty());
}

TEST(MarketIo, Rejects) {
  const std::string head = R"({"n": 2, "m": 1, "family": "linear", )";
  EXPECT_EQ(code_of("{"), ErrorCode::Parse);
  EXPECT_EQ(code_of("[]"), ErrorCode::Parse);
  EXPECT_EQ(code_of(head + R"("budgets": [1, NaN], "valuations": [[1], [1]]})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(head + R"("budgets": [1, -1], "valuations": [[1], [1]]})"),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(head + R"("budgets": [1, 1], "valuations": [[1], [-2]]})"),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(head + R"("budgets": [1, 1], "valuations": [[1], [1]], "edges": [[1, 1]]})"),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(head + R"("budgets": [1], "valuations": [[1], [1]]})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(head + R"("budgets": [1, 1], "valuations": [[1, 2], [1]]})"), ErrorCode::Parse);
  EXPECT_EQ(code_of(head + R"("budgets": [1, 1], "valuations": [[1], [1]], "edges": [[0]]})"),
            ErrorCode::Parse);
  EXPECT_EQ(code_of(R"({"n": 1, "m": 1, "family": "ces", "budgets": [1], "valuations": [[1]]})"),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of(R"({"n": 0, "m": 1, "family": "linear", "budgets": [], "valuations": [[1]]})"),
            ErrorCode::Parse);
}

TEST(MarketIo, AllocationAndPrices) {
  const Allocation x = mat(2, 2, {0.25, 0.5, 0.75, 0});
  EXPECT_EQ(allocation_from_json(allocation_to_json(x)), x);
  EXPECT_EQ(allocation_from_json("[[0.25, 0.5], [0.75, 0]]"), x);
  const PriceVector p{1.5, 2.0};
  EXPECT_EQ(prices_from_json(prices_to_json(p)), p);
  EXPECT_EQ(prices_from_json("[1.5, 2]"), p);
  EXPECT_THROW(prices_from_json("[1, -2]"), Error);
  EXPECT_THROW(allocation_from_json("[[1, -2]]"), Error);
  EXPECT_THROW(prices_from_json(R"({"p": [1]})"), Error);
}

TEST(MarketIo, Files) {
  const auto dir = std::filesystem::temp_directory_path() / "infmarket_io_test";
  std::filesystem::create_directories(dir);
  const MarketInstance mkt(Family::Leontief, {2}, mat(1, 2, {1, 2}), {});
  save_market(mkt, dir / "m.json");
  EXPECT_EQ(load_market(dir / "m.json"), mkt);
  try {
    load_market(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
    EXPECT_NE(std::string(e.what()).find("missing.json"), std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
