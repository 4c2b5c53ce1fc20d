#pragma once

#include <filesystem>
#include <string>

#include "market.hpp"

namespace infmarket {

// Markets, allocations, prices and certificates are stored as JSON documents.
//
//   {"n": 2, "m": 2, "family": "cobb-douglas",
//    "budgets": [10, 10], "valuations": [[0.5, 0.5], [0.5, 0.5]],
//    "edges": [[0, 1]]}
//
// An edge [k, i] makes buyer i's utility depend on buyer k's bundle.

MarketInstance market_from_json(const std::string& text);
std::string market_to_json(const MarketInstance& mkt);
MarketInstance load_market(const std::filesystem::path& path);
void save_market(const MarketInstance& mkt, const std::filesystem::path& path);

/// Accepts a bare n x m array or {"allocation": [[...], ...]}.
Allocation allocation_from_json(const std::string& text);
std::string allocation_to_json(const Allocation& x);
/// Accepts a bare array or {"prices": [...]}.
PriceVector prices_from_json(const std::string& text);
std::string prices_to_json(const PriceVector& p);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace infmarket
