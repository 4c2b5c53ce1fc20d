// Command-line front end. Talks to the solver only through the C interface.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "infmarket/infmarket.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertificateFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitInternal = 3;

struct MarketDeleter {
  void operator()(im_market* m) const { im_market_free(m); }
};
struct SolutionDeleter {
  void operator()(im_solution* s) const { im_solution_free(s); }
};
struct StringDeleter {
  void operator()(char* s) const { im_string_free(s); }
};
using MarketPtr = std::unique_ptr<im_market, MarketDeleter>;
using SolutionPtr = std::unique_ptr<im_solution, SolutionDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

// Thrown on a failed library call; carries the exit code to use.
struct CallFailed {
  int exit_code;
};

void ok(im_status s) {
  if (s == IM_OK) return;
  std::cerr << "error: " << im_status_string(s) << ": " << im_last_error() << '\n';
  throw CallFailed{s == IM_ERR_INTERNAL ? kExitInternal : kExitInputError};
}

im_family family_of(const std::string& name) {
  im_family f{};
  ok(im_parse_family(name.c_str(), &f));
  return f;
}

MarketPtr load(const std::string& path) {
  im_market* m = nullptr;
  ok(im_market_load(path.c_str(), &m));
  return MarketPtr(m);
}

std::string certificate_json(const im_market* mkt, const std::vector<double>& x,
                             const std::vector<double>& p, bool gne, bool* pass) {
  im_certificate cert{};
  char* raw = nullptr;
  ok(gne ? im_check_gne(mkt, x.data(), p.data(), nullptr, &cert, &raw)
         : im_check_ce(mkt, x.data(), p.data(), nullptr, &cert, &raw));
  StringPtr json(raw);
  *pass = cert.pass != 0;
  return json.get();
}

void write_file(const std::string& path, const std::string& text) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) {
    std::cerr << "error: cannot open '" << path << "' for writing\n";
    throw CallFailed{kExitInputError};
  }
  std::fputs(text.c_str(), f);
  std::fclose(f);
}

// Solver flags shared by `solve` and `experiment`.
struct SolverFlags {
  std::optional<int> outer;
  std::optional<double> eta_price;
  std::optional<int> inner;
  std::optional<double> eta_alloc;
  std::optional<double> delta;
  bool log_gradient = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--outer", outer, "outer (price) iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--eta-price", eta_price, "price learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--inner", inner, "inner extragradient iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--eta-alloc", eta_alloc, "inner learning rate")->check(CLI::PositiveNumber);
    cmd->add_option("--delta", delta, "oracle exploitability target (0 = run all inner steps)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--log-gradient", log_gradient, "inner ascent on b_i log u_i instead of u_i");
  }

  void apply(im_tatonnement_options& o) const {
    if (outer) o.outer_iters = *outer;
    if (eta_price) o.eta_price = *eta_price;
    if (inner) o.inner_iters = *inner;
    if (eta_alloc) o.eta_alloc = *eta_alloc;
    if (delta) o.delta = *delta;
    if (log_gradient) o.log_gradient = 1;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competitive equilibria of Fisher markets with social influence"};
  app.require_subcommand(1);

  // generate
  std::string family = "cobb-douglas";
  std::size_t buyers = 3;
  std::size_t goods = 3;
  double edge_prob = 0.5;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::string out;
  auto* gen = app.add_subcommand("generate", "write a random market file");
  gen->add_option("--family", family, "linear | cobb-douglas | leontief")->required();
  gen->add_option("--buyers", buyers)->check(CLI::PositiveNumber);
  gen->add_option("--goods", goods)->check(CLI::PositiveNumber);
  gen->add_option("--edge-prob", edge_prob)->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", seed);
  gen->add_option("--index", index, "market index within the seed's stream");
  gen->add_option("--out", out, "market file to write")->required();

  // solve
  std::string market_path;
  std::string method = "tatonnement";
  SolverFlags solver_flags;
  auto* solve = app.add_subcommand("solve", "solve one market and certify the result");
  solve->add_option("--market", market_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--method", method)->check(CLI::IsMember({"tatonnement", "vi"}));
  solver_flags.add_to(solve);
  solve->add_option("--out", out, "output directory")->required();

  // check
  std::string allocation_path;
  std::string prices_path;
  bool gne = false;
  auto* check = app.add_subcommand("check", "print an equilibrium certificate");
  check->add_option("--market", market_path)->required()->check(CLI::ExistingFile);
  check->add_option("--allocation", allocation_path)->required()->check(CLI::ExistingFile);
  check->add_option("--prices", prices_path)->required()->check(CLI::ExistingFile);
  check->add_flag("--gne", gne, "also certify the auctioneer conditions");

  // experiment
  int num_markets = 50;
  bool paper_defaults = false;
  unsigned threads = 1;
  SolverFlags exp_flags;
  auto* exp = app.add_subcommand("experiment", "batch run over random markets");
  exp->add_option("--family", family)->required();
  exp->add_option("--num-markets", num_markets)->check(CLI::PositiveNumber);
  exp->add_option("--seed", seed);
  exp->add_option("--buyers", buyers)->check(CLI::PositiveNumber);
  exp->add_option("--goods", goods)->check(CLI::PositiveNumber);
  exp->add_option("--edge-prob", edge_prob)->check(CLI::Range(0.0, 1.0));
  exp->add_option("--threads", threads)->check(CLI::PositiveNumber);
  exp->add_flag("--paper-defaults", paper_defaults,
                "use the family's published learning rates and iteration counts");
  exp_flags.add_to(exp);
  exp->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*gen) {
      im_market* raw = nullptr;
      ok(im_market_generate(family_of(family), buyers, goods, edge_prob, seed, index, &raw));
      MarketPtr mkt(raw);
      ok(im_market_save(mkt.get(), out.c_str()));
      return kExitOk;
    }

    if (*solve) {
      MarketPtr mkt = load(market_path);
      im_solution* raw = nullptr;
      if (method == "vi") {
        ok(im_solve_vi(mkt.get(), nullptr, &raw));
      } else {
        im_tatonnement_options o;
        im_tatonnement_defaults(im_market_family(mkt.get()), &o);
        solver_flags.apply(o);
        ok(im_solve_tatonnement(mkt.get(), &o, &raw));
      }
      SolutionPtr sol(raw);
      ok(im_solution_write(sol.get(), out.c_str()));
      const std::size_t n = im_market_buyers(mkt.get());
      const std::size_t m = im_market_goods(mkt.get());
      std::vector<double> x(n * m), p(m);
      ok(im_solution_allocation(sol.get(), x.data()));
      ok(im_solution_prices(sol.get(), p.data()));
      bool pass = false;
      const std::string cert = certificate_json(mkt.get(), x, p, false, &pass);
      write_file(out + "/certificate.json", cert + "\n");
      std::cout << cert << '\n';
      return kExitOk;
    }

    if (*check) {
      MarketPtr mkt = load(market_path);
      const std::size_t n = im_market_buyers(mkt.get());
      const std::size_t m = im_market_goods(mkt.get());
      std::vector<double> x(n * m), p(m);
      ok(im_read_allocation(allocation_path.c_str(), mkt.get(), x.data()));
      ok(im_read_prices(prices_path.c_str(), mkt.get(), p.data()));
      bool pass = false;
      std::cout << certificate_json(mkt.get(), x, p, gne, &pass) << '\n';
      return pass ? kExitOk : kExitCertificateFailed;
    }

    if (*exp) {
      const im_family f = family_of(family);
      im_experiment_options o;
      im_experiment_defaults(f, &o);
      if (!paper_defaults) im_tatonnement_defaults(IM_FAMILY_COBB_DOUGLAS, &o.solver);
      exp_flags.apply(o.solver);
      o.num_markets = num_markets;
      o.seed = seed;
      o.buyers = buyers;
      o.goods = goods;
      o.edge_prob = edge_prob;
      o.threads = threads;
      im_experiment_report report{};
      ok(im_run_experiment(&o, out.c_str(), &report));
      std::cout << "family " << im_family_name(f) << ": " << report.num_passed << "/"
                << report.num_markets << " markets certified, " << report.num_flagged
                << " flagged; results in " << out << '\n';
      return kExitOk;
    }
  } catch (const CallFailed& e) {
    return e.exit_code;
  }
  return kExitInputError;
}
