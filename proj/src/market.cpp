#include "market.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace infmarket {

std::string_view family_name(Family f) {
  switch (f) {
    case Family::Linear: return "linear";
    case Family::CobbDouglas: return "cobb-douglas";
    case Family::Leontief: return "leontief";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  if (name == "linear") return Family::Linear;
  if (name == "cobb-douglas") return Family::CobbDouglas;
  if (name == "leontief") return Family::Leontief;
  throw Error(ErrorCode::InvalidArgument, "unknown utility family '" + std::string(name) + "'");
}

MarketInstance::MarketInstance(Family family, std::vector<double> budgets, Matrix valuations,
                               std::vector<Edge> edges)
    : family_(family), budgets_(std::move(budgets)), valuations_(std::move(valuations)),
      edges_(std::move(edges)) {
  const std::size_t n = budgets_.size();
  if (n == 0 || valuations_.cols() == 0)
    throw Error(ErrorCode::InvalidArgument, "market needs at least one buyer and one good");
  if (valuations_.rows() != n)
    throw Error(ErrorCode::InvalidArgument, "valuation rows must equal the number of buyers");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(budgets_[i]) || !(budgets_[i] > 0.0)) {
      std::ostringstream os;
      os << "budget of buyer " << i << " must be finite and positive";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
  }
  for (double v : valuations_.data()) {
    if (!std::isfinite(v) || !(v > 0.0))
      throw Error(ErrorCode::InvalidArgument, "valuations must be finite and positive");
  }

  neighbors_.assign(n, {});
  for (const Edge& e : edges_) {
    if (e.source >= n || e.target >= n)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.source == e.target)
      throw Error(ErrorCode::InvalidArgument, "self-loop edges are not allowed");
    neighbors_[e.target].push_back(e.source);
  }
  for (auto& nb : neighbors_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }

  if (family_ == Family::CobbDouglas) {
    for (std::size_t i = 0; i < n; ++i) {
      auto r = valuations_.row(i);
      const double s = std::accumulate(r.begin(), r.end(), 0.0);
      for (double& v : r) v /= s;
    }
  }
}

double MarketInstance::total_budget() const noexcept {
  return std::accumulate(budgets_.begin(), budgets_.end(), 0.0);
}

void require_shape(const MarketInstance& mkt, const Allocation& x) {
  if (x.rows() != mkt.buyers() || x.cols() != mkt.goods())
    throw Error(ErrorCode::InvalidArgument, "allocation shape does not match market");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

double own_utility(const MarketInstance& mkt, std::size_t k, std::span<const double> bundle) {
  const auto v = mkt.valuation(k);
  switch (mkt.family()) {
    case Family::Linear:
      return dot(v, bundle);
    case Family::CobbDouglas: {
      double u = 1.0;
      for (std::size_t j = 0; j < v.size(); ++j) u *= std::pow(bundle[j], v[j]);
      return u;
    }
    case Family::Leontief: {
      double u = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < v.size(); ++j) u = std::min(u, bundle[j] / v[j]);
      return u;
    }
  }
  return 0.0;
}

namespace {

void check_buyer(const MarketInstance& mkt, std::size_t i) {
  if (i >= mkt.buyers()) throw std::out_of_range("buyer index out of range");
}

double neighbor_min(const MarketInstance& mkt, std::size_t i, const Allocation& x) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t k : mkt.neighbors(i)) m = std::min(m, own_utility(mkt, k, x.row(k)));
  return m;
}

// Leontief selection: zero when a neighbour attains the minimum, otherwise the
// lowest-index own argmin. Returns m when the gradient is zero.
std::size_t leontief_active_good(const MarketInstance& mkt, std::size_t i, const Allocation& x) {
  const auto v = mkt.valuation(i);
  const auto xi = x.row(i);
  std::size_t arg = 0;
  double own = xi[0] / v[0];
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (xi[j] / v[j] < own) {
      own = xi[j] / v[j];
      arg = j;
    }
  }
  if (neighbor_min(mkt, i, x) <= own) return v.size();
  return arg;
}

}  // namespace

double utility(const MarketInstance& mkt, std::size_t i, const Allocation& x) {
  check_buyer(mkt, i);
  require_shape(mkt, x);
  double u = own_utility(mkt, i, x.row(i));
  for (std::size_t k : mkt.neighbors(i)) {
    const double uk = own_utility(mkt, k, x.row(k));
    switch (mkt.family()) {
      case Family::Linear: u += uk; break;
      case Family::CobbDouglas: u *= uk; break;
      case Family::Leontief: u = std::min(u, uk); break;
    }
  }
  return u;
}

Bundle log_utility_grad(const MarketInstance& mkt, std::size_t i, const Allocation& x,
                        double eps_u) {
  check_buyer(mkt, i);
  require_shape(mkt, x);
  const std::size_t m = mkt.goods();
  const double b = mkt.budget(i);
  const auto v = mkt.valuation(i);
  Bundle g(m, 0.0);
  switch (mkt.family()) {
    case Family::Linear: {
      const double scale = b / (utility(mkt, i, x) + eps_u);
      for (std::size_t j = 0; j < m; ++j) g[j] = scale * v[j];
      break;
    }
    case Family::CobbDouglas:
      for (std::size_t j = 0; j < m; ++j) g[j] = b * v[j] / std::max(x(i, j), eps_u);
      break;
    case Family::Leontief: {
      const std::size_t j = leontief_active_good(mkt, i, x);
      if (j < m) g[j] = b / (v[j] * (utility(mkt, i, x) + eps_u));
      break;
    }
  }
  return g;
}

Bundle utility_grad(const MarketInstance& mkt, std::size_t i, const Allocation& x, double eps_u) {
  check_buyer(mkt, i);
  require_shape(mkt, x);
  const std::size_t m = mkt.goods();
  const auto v = mkt.valuation(i);
  Bundle g(m, 0.0);
  switch (mkt.family()) {
    case Family::Linear:
      std::copy(v.begin(), v.end(), g.begin());
      break;
    case Family::CobbDouglas: {
      // Evaluated at the eps_u-floored profile so zero coordinates keep a
      // nonzero ascent direction.
      Allocation floored = x;
      for (double& e : floored.data()) e = std::max(e, eps_u);
      const double u = utility(mkt, i, floored);
      for (std::size_t j = 0; j < m; ++j) g[j] = v[j] * u / floored(i, j);
      break;
    }
    case Family::Leontief: {
      const std::size_t j = leontief_active_good(mkt, i, x);
      if (j < m) g[j] = 1.0 / v[j];
      break;
    }
  }
  return g;
}

std::vector<double> excess_demand(const Allocation& x) {
  std::vector<double> z(x.cols(), -1.0);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) z[j] += x(i, j);
  return z;
}

}  // namespace infmarket
