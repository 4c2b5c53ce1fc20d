#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace infmarket {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  Io,
  UnpricedGood,
  UnboundedBestResponse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Dense row-major matrix. Rows are buyers, columns are goods.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using Allocation = Matrix;
using PriceVector = std::vector<double>;
using Bundle = std::vector<double>;

enum class Family { Linear, CobbDouglas, Leontief };

std::string_view family_name(Family f);
Family parse_family(std::string_view name);

/// Directed influence edge: buyer `target`'s utility depends on `source`'s bundle.
struct Edge {
  std::size_t source;
  std::size_t target;
  bool operator==(const Edge&) const = default;
};

/// Immutable Fisher market with social influence. Supply of every good is 1.
///
/// Cobb-Douglas exponents are normalized to unit row sums on construction so
/// that each buyer's own utility is homogeneous of degree one.
class MarketInstance {
 public:
  MarketInstance(Family family, std::vector<double> budgets, Matrix valuations,
                 std::vector<Edge> edges);

  Family family() const noexcept { return family_; }
  std::size_t buyers() const noexcept { return budgets_.size(); }
  std::size_t goods() const noexcept { return valuations_.cols(); }
  double budget(std::size_t i) const { return budgets_.at(i); }
  std::span<const double> budgets() const noexcept { return budgets_; }
  const Matrix& valuations() const noexcept { return valuations_; }
  std::span<const double> valuation(std::size_t i) const { return valuations_.row(i); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  /// In-neighbours N_i, ascending.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_.at(i); }
  double total_budget() const noexcept;

  bool operator==(const MarketInstance&) const = default;

 private:
  Family family_;
  std::vector<double> budgets_;
  Matrix valuations_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> neighbors_;
};

inline constexpr double kDefaultEpsU = 1e-8;

/// Utility of buyer k's bundle in isolation (the per-buyer building block).
double own_utility(const MarketInstance& mkt, std::size_t k, std::span<const double> bundle);

/// Influence utility u_i(x_i, x_{N_i}).
double utility(const MarketInstance& mkt, std::size_t i, const Allocation& x);

/// Subgradient of x_i -> b_i log(u_i + eps_u) with respect to x_i.
Bundle log_utility_grad(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                        double eps_u = kDefaultEpsU);

/// Subgradient of x_i -> u_i with respect to x_i (same selection rules as log_utility_grad).
Bundle utility_grad(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                    double eps_u = kDefaultEpsU);

/// z_j = sum_i x_ij - 1.
std::vector<double> excess_demand(const Allocation& x);

double dot(std::span<const double> a, std::span<const double> b);

void require_shape(const MarketInstance& mkt, const Allocation& x);

}  // namespace infmarket
