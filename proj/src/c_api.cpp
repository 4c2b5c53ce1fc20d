#include "infmarket/infmarket.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include "equilibrium_check.hpp"
#include "experiment.hpp"
#include "market_io.hpp"
#include "tatonnement.hpp"
#include "vi_solver.hpp"

using namespace infmarket;

struct im_market {
  MarketInstance impl;
};

struct im_solution {
  Allocation x;
  PriceVector p;
  std::optional<SolverTrajectory> trajectory;
  std::size_t iterations = 0;
  std::size_t unpriced = 0;
};

namespace {

thread_local std::string g_last_error;

im_status fail(im_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

im_status to_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::InvalidArgument: return IM_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return IM_ERR_PARSE;
    case ErrorCode::Io: return IM_ERR_IO;
    case ErrorCode::UnpricedGood: return IM_ERR_UNPRICED_GOOD;
    case ErrorCode::UnboundedBestResponse: return IM_ERR_UNBOUNDED_BEST_RESPONSE;
  }
  return IM_ERR_INTERNAL;
}

template <class F>
im_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return IM_OK;
  } catch (const Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::out_of_range& e) {
    return fail(IM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IM_ERR_INTERNAL, e.what());
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw Error(ErrorCode::InvalidArgument, what);
}

Family to_family(im_family f) {
  switch (f) {
    case IM_FAMILY_LINEAR: return Family::Linear;
    case IM_FAMILY_COBB_DOUGLAS: return Family::CobbDouglas;
    case IM_FAMILY_LEONTIEF: return Family::Leontief;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

im_family from_family(Family f) {
  switch (f) {
    case Family::Linear: return IM_FAMILY_LINEAR;
    case Family::CobbDouglas: return IM_FAMILY_COBB_DOUGLAS;
    case Family::Leontief: return IM_FAMILY_LEONTIEF;
  }
  return IM_FAMILY_LINEAR;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

TatonnementConfig to_config(const im_tatonnement_options& o) {
  TatonnementConfig cfg;
  cfg.outer_iters = o.outer_iters;
  cfg.eta_p = o.eta_price;
  cfg.oracle.inner_iters = o.inner_iters;
  cfg.oracle.eta_x = o.eta_alloc;
  cfg.oracle.delta = o.delta;
  cfg.oracle.gradient = o.log_gradient ? AscentGradient::LogUtility : AscentGradient::Utility;
  cfg.eps_p = o.price_floor;
  cfg.record_every = o.record_every;
  if (cfg.outer_iters < 1 || !(cfg.eta_p > 0.0) || cfg.oracle.inner_iters < 1 ||
      !(cfg.oracle.eta_x > 0.0) || !(cfg.oracle.delta >= 0.0) || cfg.record_every < 1)
    throw Error(ErrorCode::InvalidArgument,
                "iteration counts must be >= 1, learning rates > 0 and delta >= 0");
  return cfg;
}

im_tatonnement_options from_config(const TatonnementConfig& cfg) {
  im_tatonnement_options o{};
  o.outer_iters = cfg.outer_iters;
  o.eta_price = cfg.eta_p;
  o.inner_iters = cfg.oracle.inner_iters;
  o.eta_alloc = cfg.oracle.eta_x;
  o.delta = cfg.oracle.delta;
  o.price_floor = cfg.eps_p;
  o.record_every = cfg.record_every;
  o.log_gradient = cfg.oracle.gradient == AscentGradient::LogUtility;
  return o;
}

Tolerances to_tolerances(const im_tolerances& t) {
  Tolerances out;
  out.feasibility = t.feasibility;
  out.walras = t.walras;
  out.budget = t.budget;
  out.budget_slack = t.budget_slack;
  out.br_gap = t.br_gap;
  out.price_sum = t.price_sum;
  out.auctioneer = t.auctioneer;
  return out;
}

im_tolerances from_tolerances(const Tolerances& t) {
  return {t.feasibility, t.walras, t.budget, t.budget_slack, t.br_gap, t.price_sum, t.auctioneer};
}

Allocation copy_allocation(const MarketInstance& mkt, const double* data) {
  Allocation x(mkt.buyers(), mkt.goods());
  std::memcpy(x.data().data(), data, x.data().size() * sizeof(double));
  return x;
}

im_status check_common(const im_market* market, const double* allocation, const double* prices,
                       const im_tolerances* tol, im_certificate* out, char** json, bool gne) {
  return guarded([&] {
    require(market && allocation && prices && out, "null argument");
    const MarketInstance& mkt = market->impl;
    const Allocation x = copy_allocation(mkt, allocation);
    const std::span<const double> p(prices, mkt.goods());
    const Tolerances t = tol ? to_tolerances(*tol) : default_tolerances(mkt, p);
    const EquilibriumCertificate c = gne ? check_gne(mkt, x, p, t) : check_ce(mkt, x, p, t);
    *out = im_certificate{c.feasibility_violation, c.walras_residual, c.budget_violation,
                          c.budget_slack,          c.br_gap,          c.price_sum_gap,
                          c.auctioneer_gap,        from_tolerances(c.tolerances),
                          c.verdict.pass ? 1 : 0};
    if (json) *json = dup_string(c.to_json());
  });
}

}  // namespace

extern "C" {

const char* im_last_error(void) { return g_last_error.c_str(); }

const char* im_status_string(im_status status) {
  switch (status) {
    case IM_OK: return "ok";
    case IM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IM_ERR_PARSE: return "parse error";
    case IM_ERR_IO: return "i/o error";
    case IM_ERR_UNPRICED_GOOD: return "unpriced good";
    case IM_ERR_UNBOUNDED_BEST_RESPONSE: return "unbounded best response";
    case IM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* im_family_name(im_family family) {
  switch (family) {
    case IM_FAMILY_LINEAR: return "linear";
    case IM_FAMILY_COBB_DOUGLAS: return "cobb-douglas";
    case IM_FAMILY_LEONTIEF: return "leontief";
  }
  return "unknown";
}

im_status im_parse_family(const char* name, im_family* out) {
  return guarded([&] {
    require(name && out, "null argument");
    *out = from_family(parse_family(name));
  });
}

void im_string_free(char* s) { std::free(s); }

im_status im_market_create(im_family family, size_t buyers, size_t goods, const double* budgets,
                           const double* valuations, const size_t* edges, size_t num_edges,
                           im_market** out) {
  return guarded([&] {
    require(out && budgets && valuations, "null argument");
    require(num_edges == 0 || edges, "null edge array");
    std::vector<double> b(budgets, budgets + buyers);
    Matrix v(buyers, goods);
    std::memcpy(v.data().data(), valuations, buyers * goods * sizeof(double));
    std::vector<Edge> e;
    for (size_t k = 0; k < num_edges; ++k) e.push_back({edges[2 * k], edges[2 * k + 1]});
    *out = new im_market{MarketInstance(to_family(family), std::move(b), std::move(v), std::move(e))};
  });
}

im_status im_market_load(const char* path, im_market** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new im_market{load_market(path)};
  });
}

im_status im_market_save(const im_market* market, const char* path) {
  return guarded([&] {
    require(market && path, "null argument");
    save_market(market->impl, path);
  });
}

im_status im_market_generate(im_family family, size_t buyers, size_t goods, double edge_prob,
                             uint64_t seed, uint64_t index, im_market** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new im_market{generate_market(to_family(family), buyers, goods, edge_prob, seed, index)};
  });
}

void im_market_free(im_market* market) { delete market; }

size_t im_market_buyers(const im_market* market) { return market ? market->impl.buyers() : 0; }
size_t im_market_goods(const im_market* market) { return market ? market->impl.goods() : 0; }

im_family im_market_family(const im_market* market) {
  return market ? from_family(market->impl.family()) : IM_FAMILY_LINEAR;
}

im_status im_market_valuations(const im_market* market, double* out) {
  return guarded([&] {
    require(market && out, "null argument");
    const auto d = market->impl.valuations().data();
    std::memcpy(out, d.data(), d.size() * sizeof(double));
  });
}

im_status im_market_budgets(const im_market* market, double* out) {
  return guarded([&] {
    require(market && out, "null argument");
    const auto b = market->impl.budgets();
    std::memcpy(out, b.data(), b.size() * sizeof(double));
  });
}

im_status im_read_allocation(const char* path, const im_market* market, double* out) {
  return guarded([&] {
    require(path && market && out, "null argument");
    const Allocation x = allocation_from_json(read_text_file(path));
    if (x.rows() != market->impl.buyers() || x.cols() != market->impl.goods()) {
      std::ostringstream os;
      os << "allocation in '" << path << "' is " << x.rows() << "x" << x.cols() << ", market is "
         << market->impl.buyers() << "x" << market->impl.goods();
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    std::memcpy(out, x.data().data(), x.data().size() * sizeof(double));
  });
}

im_status im_read_prices(const char* path, const im_market* market, double* out) {
  return guarded([&] {
    require(path && market && out, "null argument");
    const PriceVector p = prices_from_json(read_text_file(path));
    if (p.size() != market->impl.goods()) {
      std::ostringstream os;
      os << "prices in '" << path << "' have " << p.size() << " entries, market has "
         << market->impl.goods() << " goods";
      throw Error(ErrorCode::InvalidArgument, os.str());
    }
    std::memcpy(out, p.data(), p.size() * sizeof(double));
  });
}

void im_tatonnement_defaults(im_family family, im_tatonnement_options* out) {
  if (!out) return;
  Family f = Family::CobbDouglas;
  try {
    f = to_family(family);
  } catch (const Error&) {
  }
  *out = from_config(paper_defaults(f));
}

void im_vi_defaults(im_vi_options* out) {
  if (!out) return;
  const ViConfig cfg;
  *out = im_vi_options{cfg.iters, cfg.eta, cfg.support_threshold, cfg.residual_tol};
}

im_status im_solve_tatonnement(const im_market* market, const im_tatonnement_options* opts,
                               im_solution** out) {
  return guarded([&] {
    require(market && out, "null argument");
    im_tatonnement_options o;
    if (opts) {
      o = *opts;
    } else {
      im_tatonnement_defaults(from_family(market->impl.family()), &o);
    }
    TatonnementResult r = run_tatonnement(market->impl, to_config(o));
    auto sol = new im_solution;
    sol->x = std::move(r.x);
    sol->p = std::move(r.p);
    sol->iterations = static_cast<std::size_t>(o.outer_iters);
    sol->trajectory = std::move(r.trajectory);
    *out = sol;
  });
}

im_status im_solve_vi(const im_market* market, const im_vi_options* opts, im_solution** out) {
  return guarded([&] {
    require(market && out, "null argument");
    ViConfig cfg;
    if (opts) {
      cfg.iters = opts->iters;
      cfg.eta = opts->eta;
      cfg.support_threshold = opts->support_threshold;
      cfg.residual_tol = opts->residual_tol;
    }
    const MarketInstance& mkt = market->impl;
    ViResult r = solve_ve(mkt, default_vi_start(mkt), cfg);
    PriceRecovery pr = recover_prices_or_zero(mkt, r.x, cfg);
    auto sol = new im_solution;
    sol->x = std::move(r.x);
    sol->p = std::move(pr.prices);
    sol->iterations = static_cast<std::size_t>(r.iterations);
    sol->unpriced = pr.unpriced_goods.size();
    *out = sol;
  });
}

void im_solution_free(im_solution* solution) { delete solution; }

im_status im_solution_allocation(const im_solution* solution, double* out) {
  return guarded([&] {
    require(solution && out, "null argument");
    const auto d = solution->x.data();
    std::memcpy(out, d.data(), d.size() * sizeof(double));
  });
}

im_status im_solution_prices(const im_solution* solution, double* out) {
  return guarded([&] {
    require(solution && out, "null argument");
    std::memcpy(out, solution->p.data(), solution->p.size() * sizeof(double));
  });
}

size_t im_solution_iterations(const im_solution* solution) {
  return solution ? solution->iterations : 0;
}

size_t im_solution_unpriced_goods(const im_solution* solution) {
  return solution ? solution->unpriced : 0;
}

im_status im_solution_trajectory_csv(const im_solution* solution, char** out) {
  return guarded([&] {
    require(solution && out, "null argument");
    std::ostringstream os;
    if (solution->trajectory) solution->trajectory->write_csv(os);
    *out = dup_string(os.str());
  });
}

im_status im_solution_write(const im_solution* solution, const char* dir) {
  return guarded([&] {
    require(solution && dir, "null argument");
    const std::filesystem::path root(dir);
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create '" + root.string() + "': " + ec.message());
    write_text_file(root / "allocation.json", allocation_to_json(solution->x));
    write_text_file(root / "prices.json", prices_to_json(solution->p));
    if (solution->trajectory) {
      std::ostringstream os;
      solution->trajectory->write_csv(os);
      write_text_file(root / "trajectory.csv", os.str());
    }
  });
}

im_status im_default_tolerances(const im_market* market, const double* prices,
                                im_tolerances* out) {
  return guarded([&] {
    require(market && prices && out, "null argument");
    *out = from_tolerances(
        default_tolerances(market->impl, std::span<const double>(prices, market->impl.goods())));
  });
}

im_status im_check_ce(const im_market* market, const double* allocation, const double* prices,
                      const im_tolerances* tol, im_certificate* out, char** json) {
  return check_common(market, allocation, prices, tol, out, json, false);
}

im_status im_check_gne(const im_market* market, const double* allocation, const double* prices,
                       const im_tolerances* tol, im_certificate* out, char** json) {
  return check_common(market, allocation, prices, tol, out, json, true);
}

void im_experiment_defaults(im_family family, im_experiment_options* out) {
  if (!out) return;
  const ExperimentConfig cfg;
  *out = im_experiment_options{};
  out->family = family;
  out->buyers = cfg.buyers;
  out->goods = cfg.goods;
  out->num_markets = cfg.num_markets;
  out->seed = cfg.seed;
  out->edge_prob = cfg.edge_prob;
  im_tatonnement_defaults(family, &out->solver);
  out->threads = 1;
}

im_status im_run_experiment(const im_experiment_options* opts, const char* out_dir,
                            im_experiment_report* report) {
  return guarded([&] {
    require(opts, "null argument");
    ExperimentConfig cfg;
    cfg.family = to_family(opts->family);
    cfg.buyers = opts->buyers;
    cfg.goods = opts->goods;
    cfg.num_markets = opts->num_markets;
    cfg.seed = opts->seed;
    cfg.edge_prob = opts->edge_prob;
    cfg.solver = to_config(opts->solver);
    cfg.threads = opts->threads;
    if (out_dir) cfg.out_dir = out_dir;
    const ExperimentSummary s = run_experiment(cfg);
    if (!report) return;
    *report = im_experiment_report{};
    report->num_markets = static_cast<int>(s.markets.size());
    for (const auto& m : s.markets) {
      if (!m.solved) ++report->num_flagged;
      else if (m.certificate.verdict.pass) ++report->num_passed;
    }
    report->pass_rate = s.pass_rate;
    report->reference_constant = s.reference_constant;
  });
}

}  // extern "C"
