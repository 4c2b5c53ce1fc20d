// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--out DIR] [--report FILE] [--seed S] [--report-only]
//
// Exit status is 1 when any criterion fails, unless --report-only is given.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "best_response.hpp"
#include "equilibrium_check.hpp"
#include "experiment.hpp"
#include "lemmas.hpp"
#include "ne_oracle.hpp"
#include "philox.hpp"
#include "projections.hpp"
#include "tatonnement.hpp"
#include "vi_solver.hpp"

using namespace infmarket;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Streams used by the criteria below, one per criterion.
enum Stream : std::uint32_t {
  kClosedForm = 1,
  kCrossCheck,
  kSubgradient,
  kLambda,
  kProjections,
  kUtilities,
};

MarketInstance sampled_market(CounterStream& rng, Family family, std::size_t n, std::size_t m,
                              double edge_prob, std::vector<double>* raw_b = nullptr,
                              Matrix* raw_v = nullptr) {
  std::vector<double> b(n);
  for (double& v : b) v = rng.uniform(5.0, 15.0);
  Matrix v(n, m);
  for (double& e : v.data()) e = rng.uniform(5.0, 35.0);
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (k != i && rng.uniform() < edge_prob) edges.push_back({k, i});
  if (raw_b) *raw_b = b;
  if (raw_v) *raw_v = v;
  return MarketInstance(family, std::move(b), std::move(v), std::move(edges));
}

std::vector<double> sampled_vector(CounterStream& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& e : v) e = rng.uniform(lo, hi);
  return v;
}

double relative_error(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// 1. VI prices on plain Cobb-Douglas markets against p_j = sum_i b_i v_ij.
Outcome closed_form_oracle(std::uint64_t seed) {
  CounterStream rng(seed, kClosedForm, 0);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 25; ++k) {
    const std::size_t n = 2 + (rng.next_u64() & 1), m = 2 + (rng.next_u64() & 1);
    std::vector<double> b;
    Matrix v;
    const auto mkt = sampled_market(rng, Family::CobbDouglas, n, m, 0.0, &b, &v);
    const auto r = solve_ve(mkt, default_vi_start(mkt), ViConfig{});
    const auto pr = recover_prices_or_zero(mkt, r.x, ViConfig{});
    for (std::size_t j = 0; j < m; ++j) {
      double expected = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t jj = 0; jj < m; ++jj) row += v(i, jj);
        expected += b[i] * v(i, j) / row;
      }
      const double err = relative_error(pr.prices[j], expected);
      worst = std::max(worst, err);
      if (err > 1e-2) ++failures;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {failures == 0 && secs < 5.0, "25 markets, worst relative error " + fmt(worst) + ", " +
                                           fmt(secs) + " s (limits 1e-2, 5 s)"};
}

// 2. Tatonnement and VI agree on Cobb-Douglas influence markets.
Outcome cross_agreement(std::uint64_t seed) {
  CounterStream rng(seed, kCrossCheck, 0);
  const auto start = std::chrono::steady_clock::now();
  int agree = 0, tat_pass = 0, vi_pass = 0;
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const auto mkt = sampled_market(rng, Family::CobbDouglas, 3, 3, 0.5);
    const auto tat = run_tatonnement(mkt, paper_defaults(Family::CobbDouglas));
    const auto vi = solve_ve(mkt, default_vi_start(mkt), ViConfig{});
    const auto pr = recover_prices_or_zero(mkt, vi.x, ViConfig{});
    double err = 0.0;
    for (std::size_t j = 0; j < 3; ++j) err = std::max(err, relative_error(tat.p[j], pr.prices[j]));
    worst = std::max(worst, err);
    agree += err <= 2e-2;
    tat_pass += check_ce(mkt, tat.x, tat.p, default_tolerances(mkt, tat.p)).verdict.pass;
    vi_pass += check_ce(mkt, vi.x, pr.prices, default_tolerances(mkt, pr.prices)).verdict.pass;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {agree == 10 && tat_pass == 10 && vi_pass == 10 && secs < 60.0,
          "prices agree " + std::to_string(agree) + "/10 (worst " + fmt(worst) +
              "), tatonnement certified " + std::to_string(tat_pass) + "/10, vi certified " +
              std::to_string(vi_pass) + "/10, " + fmt(secs) + " s"};
}

// 3. Central differences of the value function against 1 - sum_i x*_i.
Outcome subgradient_identity(std::uint64_t seed) {
  CounterStream rng(seed, kSubgradient, 0);
  const double h = 1e-3;
  double worst = 0.0;
  double worst_expl = 0.0;
  for (int k = 0; k < 5; ++k) {
    const auto mkt = sampled_market(rng, Family::CobbDouglas, 2, 2, 0.5);
    const auto p = sampled_vector(rng, 2, 5.0, 20.0);
    NeOracleConfig oracle;
    oracle.inner_iters = 5000;
    oracle.eta_x = 0.05;
    const auto x0 = default_initial_allocation(mkt, p, default_price_floor(mkt));
    const auto ne = solve_ne(mkt, p, x0, oracle);
    worst_expl = std::max(worst_expl, ne.exploitability);
    const auto g = value_function_subgradient(ne.x);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) {
        auto up = p, dn = p;
        up[j] += h;
        dn[j] -= h;
        const double fd =
            (value_function(mkt, i, up, ne.x) - value_function(mkt, i, dn, ne.x)) / (2 * h);
        worst = std::max(worst, std::abs(fd - g[j]));
      }
  }
  return {worst <= 1e-2, "5 markets, worst |fd - (1 - sum x*)| " + fmt(worst) +
                             " (limit 1e-2), oracle exploitability <= " + fmt(worst_expl)};
}

struct FamilyRun {
  ExperimentSummary summary;
  double seconds = 0.0;
};

FamilyRun run_family(Family family, std::uint64_t seed, const std::filesystem::path& out) {
  ExperimentConfig cfg;
  cfg.family = family;
  cfg.seed = seed;
  cfg.solver = paper_defaults(family);
  cfg.out_dir = out.empty() ? out : out / std::string(family_name(family));
  const auto start = std::chrono::steady_clock::now();
  FamilyRun run{run_experiment(cfg), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

double residual_at(const ExperimentSummary& s, int t) {
  const auto r = s.residual();
  for (std::size_t k = 0; k < s.t.size(); ++k)
    if (s.t[k] == t) return r[k];
  return std::numeric_limits<double>::quiet_NaN();
}

// 4. Convergence shape of the averaged objective.
Outcome convergence_shape(const FamilyRun& lin, const FamilyRun& cd, const FamilyRun& leo) {
  const auto r = lin.summary.residual();
  int violations = 0;
  double worst_ratio = 0.0;
  for (std::size_t k = 0; k < lin.summary.t.size(); ++k) {
    const int t = lin.summary.t[k];
    if (t < 20 || t > 400) continue;
    const double ref = lin.summary.reference[k];
    if (r[k] > ref * (1.0 + 1e-12)) {
      ++violations;
      worst_ratio = std::max(worst_ratio, r[k] / ref);
    }
  }
  const double cd100 = residual_at(cd.summary, 100);
  const double lin100 = residual_at(lin.summary, 100);
  const double slowest = std::max({lin.seconds, cd.seconds, leo.seconds});
  const bool pass = violations == 0 && cd100 < lin100 && slowest < 1800.0;
  std::string detail = "linear residual above C/sqrt(t) at " + std::to_string(violations) +
                       " of 381 points";
  if (violations) detail += " (worst ratio " + fmt(worst_ratio) + ")";
  detail += "; residual at t=100: cobb-douglas " + fmt(cd100) + ", linear " + fmt(lin100) +
            "; slowest family " + fmt(slowest) + " s";
  return {pass, detail};
}

// 5. Certification rates of the reference-hyperparameter runs.
Outcome certification_rates(const FamilyRun& lin, const FamilyRun& cd, const FamilyRun& leo) {
  const auto count = [](const ExperimentSummary& s, auto pick) {
    int c = 0;
    for (const auto& m : s.markets) c += m.solved && pick(m.certificate.verdict);
    return c;
  };
  const auto all = [](const Verdict& v) { return v.pass; };
  const int cd_pass = count(cd.summary, all);
  const int lin_pass = count(lin.summary, all);
  const int leo_feas = count(leo.summary, [](const Verdict& v) { return v.feasibility; });
  const int leo_walras = count(leo.summary, [](const Verdict& v) { return v.walras; });
  const int n = static_cast<int>(cd.summary.markets.size());
  const bool pass = cd_pass >= 0.9 * n && lin_pass >= 0.7 * n &&
                    leo_feas == static_cast<int>(leo.summary.markets.size()) &&
                    leo_walras == static_cast<int>(leo.summary.markets.size());
  return {pass, "cobb-douglas " + std::to_string(cd_pass) + "/" + std::to_string(n) +
                    " (need 90%), linear " + std::to_string(lin_pass) + "/" +
                    std::to_string(lin.summary.markets.size()) +
                    " (need 70%), leontief feasibility " + std::to_string(leo_feas) + "/" +
                    std::to_string(leo.summary.markets.size()) + " and walras " +
                    std::to_string(leo_walras) + "/" +
                    std::to_string(leo.summary.markets.size()) + " (need all)"};
}

// 6. Budget-constrained optimum against the unit-multiplier penalty.
Outcome lambda_one(std::uint64_t seed) {
  CounterStream rng(seed, kLambda, 0);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + rng.next_u64() % 3, m = 1 + rng.next_u64() % 3;
    const auto mkt = sampled_market(rng, Family::CobbDouglas, n, m, 0.5);
    const auto p = sampled_vector(rng, m, 1.0, 3.0);
    Allocation others(n, m);
    for (double& e : others.data()) e = rng.uniform(0.05, 1.0);
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += others(i, j);
      for (std::size_t i = 0; i < n; ++i) others(i, j) /= std::max(s, 1.0);
    }
    const std::size_t i = rng.next_u64() % n;
    worst = std::max(worst, verify_lambda_one(mkt, i, others, p).gap);
  }
  return {worst <= 1e-3, "100 instances, worst gap " + fmt(worst) + " (limit 1e-3)"};
}

// 7. Property suites.
Outcome property_suites(std::uint64_t seed) {
  CounterStream rng(seed, kProjections, 0);
  std::vector<std::string> failed;
  const auto dist = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
  };

  // Projections: idempotence, optimality (first-order condition against a
  // feasible point), nonexpansiveness; 1000 cases per set and property.
  using Proj = std::function<std::vector<double>(const std::vector<double>&)>;
  struct Set {
    const char* name;
    std::function<Proj(std::size_t, std::vector<double>&)> make;  // also fills a feasible point
  };
  const std::vector<Set> sets{
      {"nonneg",
       [&](std::size_t dim, std::vector<double>& w) -> Proj {
         w = sampled_vector(rng, dim, 0.0, 5.0);
         return [](const std::vector<double>& y) { return project_nonneg(y); };
       }},
      {"budget",
       [&](std::size_t dim, std::vector<double>& w) -> Proj {
         const auto p = sampled_vector(rng, dim, 0.0, 4.0);
         const double b = rng.uniform(0.1, 10.0);
         w = sampled_vector(rng, dim, 0.0, 5.0);
         const double s = dot(w, p);
         const double scale = rng.uniform();
         if (s > b)
           for (double& v : w) v *= scale * b / s;
         return [p, b](const std::vector<double>& y) { return project_budget(y, {p, b}); };
       }},
      {"simplex",
       [&](std::size_t dim, std::vector<double>& w) -> Proj {
         w = sampled_vector(rng, dim, 0.0, 1.0);
         double s = 0.0;
         for (double v : w) s += v;
         const double scale = rng.uniform();
         if (s > 1.0)
           for (double& v : w) v *= scale / s;
         return [](const std::vector<double>& y) { return project_capped_simplex(y); };
       }},
  };
  for (const auto& set : sets) {
    int bad_idem = 0, bad_opt = 0, bad_nonexp = 0;
    for (int c = 0; c < 1000; ++c) {
      const std::size_t dim = 1 + rng.next_u64() % 6;
      std::vector<double> w;
      const Proj proj = set.make(dim, w);
      const auto y1 = sampled_vector(rng, dim, -5.0, 5.0);
      const auto y2 = sampled_vector(rng, dim, -5.0, 5.0);
      const auto p1 = proj(y1);
      const auto p2 = proj(y2);
      if (dist(proj(p1), p1) > 1e-12) ++bad_idem;
      double fo = 0.0;
      for (std::size_t k = 0; k < dim; ++k) fo += (y1[k] - p1[k]) * (w[k] - p1[k]);
      if (fo > 1e-8 || dist(y1, p1) > dist(y1, w) + 1e-9) ++bad_opt;
      if (dist(p1, p2) > dist(y1, y2) + 1e-9) ++bad_nonexp;
    }
    if (bad_idem) failed.push_back(std::string(set.name) + " idempotence");
    if (bad_opt) failed.push_back(std::string(set.name) + " optimality");
    if (bad_nonexp) failed.push_back(std::string(set.name) + " nonexpansiveness");
  }

  // Utilities: homogeneity, Euler, monotone gradient operator, finite differences.
  CounterStream urng(seed, kUtilities, 0);
  const auto random_alloc = [&](std::size_t n, std::size_t m, double lo, double hi) {
    Allocation x(n, m);
    for (double& e : x.data()) e = urng.uniform(lo, hi);
    return x;
  };
  int bad_homog = 0, bad_euler = 0, bad_mono = 0, bad_fd = 0;
  for (int c = 0; c < 500; ++c) {
    const auto mkt = sampled_market(urng, Family::CobbDouglas, 3, 3, 0.5);
    const std::size_t i = c % 3;
    Allocation x = random_alloc(3, 3, 0.01, 2.0);
    const Allocation y = random_alloc(3, 3, 0.01, 2.0);
    const double u = utility(mkt, i, x);
    const auto g = utility_grad(mkt, i, x, 0.0);
    if (std::abs(dot(g, x.row(i)) - u) > 1e-8 * u) ++bad_euler;
    double mono = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
      const auto gx = log_utility_grad(mkt, k, x);
      const auto gy = log_utility_grad(mkt, k, y);
      for (std::size_t j = 0; j < 3; ++j) mono += (gx[j] - gy[j]) * (x(k, j) - y(k, j));
    }
    if (mono > 1e-9) ++bad_mono;
    const double l = urng.uniform(0.0, 5.0);
    for (double& v : x.row(i)) v *= l;
    if (std::abs(utility(mkt, i, x) - l * u) > 1e-8 * std::max(1.0, l * u)) ++bad_homog;
  }
  const double h = 1e-6;
  for (Family f : {Family::Linear, Family::CobbDouglas, Family::Leontief}) {
    for (int c = 0; c < 100; ++c) {
      const auto mkt = sampled_market(urng, f, 3, 3, 0.5);
      const std::size_t i = c % 3;
      Allocation x = random_alloc(3, 3, 0.1, f == Family::Leontief ? 50.0 : 2.0);
      if (f == Family::Leontief) {
        // Interior points only: unique own argmin, strictly below every neighbour.
        std::vector<double> r;
        for (std::size_t j = 0; j < 3; ++j) r.push_back(x(i, j) / mkt.valuations()(i, j));
        std::sort(r.begin(), r.end());
        double nb = std::numeric_limits<double>::infinity();
        for (std::size_t k : mkt.neighbors(i)) nb = std::min(nb, own_utility(mkt, k, x.row(k)));
        if (r[1] - r[0] <= 0.1 || nb - r[0] <= 0.1) continue;
      }
      const auto g = log_utility_grad(mkt, i, x);
      for (std::size_t j = 0; j < 3; ++j) {
        const double x0 = x(i, j);
        x(i, j) = x0 + h;
        const double up = mkt.budget(i) * std::log(utility(mkt, i, x) + kDefaultEpsU);
        x(i, j) = x0 - h;
        const double dn = mkt.budget(i) * std::log(utility(mkt, i, x) + kDefaultEpsU);
        x(i, j) = x0;
        if (std::abs(g[j] - (up - dn) / (2 * h)) > 1e-5) ++bad_fd;
      }
    }
  }
  if (bad_homog) failed.push_back("homogeneity");
  if (bad_euler) failed.push_back("euler");
  if (bad_mono) failed.push_back("monotonicity");
  if (bad_fd) failed.push_back("finite differences");

  // Exact equilibria pass both certificates at zero tolerance.
  struct Exact {
    MarketInstance mkt;
    Allocation x;
    std::vector<double> p;
  };
  const auto mat = [](std::size_t r, std::size_t c, std::vector<double> v) {
    Matrix x(r, c);
    std::copy(v.begin(), v.end(), x.data().begin());
    return x;
  };
  const std::vector<Exact> exact{
      {MarketInstance(Family::CobbDouglas, {10}, mat(1, 1, {1}), {}), mat(1, 1, {1}), {10}},
      {MarketInstance(Family::CobbDouglas, {1, 3}, mat(2, 1, {1, 1}), {}),
       mat(2, 1, {0.25, 0.75}), {4}},
      {MarketInstance(Family::CobbDouglas, {10, 10}, mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {}),
       mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {10, 10}},
      {MarketInstance(Family::CobbDouglas, {2, 6}, mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {{0, 1}}),
       mat(2, 2, {0.25, 0.25, 0.75, 0.75}), {4, 4}},
      {MarketInstance(Family::Linear, {4, 4}, mat(2, 2, {2, 1, 1, 2}), {}),
       mat(2, 2, {1, 0, 0, 1}), {4, 4}},
  };
  int bad_round_trip = 0;
  for (const auto& e : exact) {
    const bool gne = check_gne(e.mkt, e.x, e.p, Tolerances::uniform(0.0)).verdict.pass;
    const bool ce = check_ce(e.mkt, e.x, e.p, Tolerances::uniform(0.0)).verdict.pass;
    if (!gne || !ce) ++bad_round_trip;
  }
  if (bad_round_trip) failed.push_back("exact-zero round trip");

  std::string detail = "projections 3x3x1000 cases, utilities 500 cases, gradients 300 cases, " +
                       std::to_string(exact.size()) + " exact equilibria";
  if (!failed.empty()) {
    detail += "; failed:";
    for (const auto& f : failed) detail += " " + f;
  }
  return {failed.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string out_dir;
  std::string report_path;
  std::uint64_t seed = 42;
  bool report_only = false;
  app.add_option("--out", out_dir, "directory for the experiment runs");
  app.add_option("--report", report_path, "also write the result lines to this file");
  app.add_option("--seed", seed, "master seed");
  app.add_flag("--report-only", report_only, "exit 0 even when a criterion fails");
  CLI11_PARSE(app, argc, argv);

  std::vector<std::string> lines;
  bool all = true;
  const auto record = [&](int id, const std::string& name, const Outcome& o) {
    std::string line = std::string(o.pass ? "PASS" : "FAIL") + " criterion " +
                       std::to_string(id) + " " + name + ": " + o.detail;
    std::cout << line << std::endl;
    lines.push_back(std::move(line));
    all = all && o.pass;
  };

  try {
    record(1, "closed-form cobb-douglas prices", closed_form_oracle(seed));
    record(2, "solver cross-agreement", cross_agreement(seed));
    record(3, "subgradient identity", subgradient_identity(seed));
    const FamilyRun lin = run_family(Family::Linear, seed, out_dir);
    const FamilyRun cd = run_family(Family::CobbDouglas, seed, out_dir);
    const FamilyRun leo = run_family(Family::Leontief, seed, out_dir);
    record(4, "convergence at full scale", convergence_shape(lin, cd, leo));
    record(5, "certification rates", certification_rates(lin, cd, leo));
    record(6, "unit multiplier", lambda_one(seed));
    record(7, "property suites", property_suites(seed));
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << '\n';
    return 2;
  }

  if (!report_path.empty()) {
    std::ofstream os(report_path);
    for (const auto& l : lines) os << l << '\n';
  }
  return all || report_only ? 0 : 1;
}
