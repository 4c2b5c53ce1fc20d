/* infmarket: equilibrium computation for Fisher markets with social influence.
 *
 * Plain C interface over the C++ core. All handles are opaque; every call
 * that can fail returns an im_status and leaves a message retrievable with
 * im_last_error() on the calling thread.
 *
 * Matrices are row-major, rows are buyers and columns are goods.
 */
#ifndef INFMARKET_INFMARKET_H
#define INFMARKET_INFMARKET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(INFMARKET_BUILDING)
#    define IM_API __declspec(dllexport)
#  else
#    define IM_API __declspec(dllimport)
#  endif
#else
#  define IM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum im_status {
  IM_OK = 0,
  IM_ERR_INVALID_ARGUMENT = 1,
  IM_ERR_PARSE = 2,
  IM_ERR_IO = 3,
  IM_ERR_UNPRICED_GOOD = 4,
  IM_ERR_UNBOUNDED_BEST_RESPONSE = 5,
  IM_ERR_INTERNAL = 6
} im_status;

typedef enum im_family {
  IM_FAMILY_LINEAR = 0,
  IM_FAMILY_COBB_DOUGLAS = 1,
  IM_FAMILY_LEONTIEF = 2
} im_family;

typedef struct im_market im_market;
typedef struct im_solution im_solution;

/* Message for the last failed call on this thread ("" if none). */
IM_API const char* im_last_error(void);
IM_API const char* im_status_string(im_status status);
IM_API const char* im_family_name(im_family family);
IM_API im_status im_parse_family(const char* name, im_family* out);

/* Frees strings returned by this library. */
IM_API void im_string_free(char* s);

/* ---- markets ---------------------------------------------------------- */

/* edges holds num_edges (source, target) pairs: target's utility depends on
 * source's bundle. */
IM_API im_status im_market_create(im_family family, size_t buyers, size_t goods,
                                  const double* budgets, const double* valuations,
                                  const size_t* edges, size_t num_edges, im_market** out);
IM_API im_status im_market_load(const char* path, im_market** out);
IM_API im_status im_market_save(const im_market* market, const char* path);
/* Random market: budgets U[5,15], valuations U[5,35], each ordered pair an
 * edge with probability edge_prob. Deterministic in (seed, index). */
IM_API im_status im_market_generate(im_family family, size_t buyers, size_t goods,
                                    double edge_prob, uint64_t seed, uint64_t index,
                                    im_market** out);
IM_API void im_market_free(im_market* market);

IM_API size_t im_market_buyers(const im_market* market);
IM_API size_t im_market_goods(const im_market* market);
IM_API im_family im_market_family(const im_market* market);
/* Copies the (normalized, for Cobb-Douglas) valuations, buyers x goods. */
IM_API im_status im_market_valuations(const im_market* market, double* out);
IM_API im_status im_market_budgets(const im_market* market, double* out);

/* Reads an allocation (buyers x goods) or price vector (goods) file and
 * checks its shape against the market. */
IM_API im_status im_read_allocation(const char* path, const im_market* market, double* out);
IM_API im_status im_read_prices(const char* path, const im_market* market, double* out);

/* ---- solvers ---------------------------------------------------------- */

typedef struct im_tatonnement_options {
  int outer_iters;
  double eta_price;
  int inner_iters;
  double eta_alloc;
  double delta;         /* oracle early exit; 0 disables */
  double price_floor;   /* negative selects 1e-3 * sum(b) / m */
  int record_every;
  int log_gradient;     /* nonzero: inner ascent on b_i log u_i instead of u_i */
} im_tatonnement_options;

/* Published per-family hyperparameters (400 outer iterations). */
IM_API void im_tatonnement_defaults(im_family family, im_tatonnement_options* out);

typedef struct im_vi_options {
  int iters;
  double eta;
  double support_threshold;
  double residual_tol;
} im_vi_options;

IM_API void im_vi_defaults(im_vi_options* out);

IM_API im_status im_solve_tatonnement(const im_market* market, const im_tatonnement_options* opts,
                                      im_solution** out);
/* Extragradient on the joint variational inequality, then price recovery.
 * Goods nobody holds get price 0 and are counted in
 * im_solution_unpriced_goods. */
IM_API im_status im_solve_vi(const im_market* market, const im_vi_options* opts,
                             im_solution** out);
IM_API void im_solution_free(im_solution* solution);

IM_API im_status im_solution_allocation(const im_solution* solution, double* out);
IM_API im_status im_solution_prices(const im_solution* solution, double* out);
IM_API size_t im_solution_iterations(const im_solution* solution);
IM_API size_t im_solution_unpriced_goods(const im_solution* solution);
/* Trajectory as CSV text (tatonnement only; empty string for VI). */
IM_API im_status im_solution_trajectory_csv(const im_solution* solution, char** out);
/* Writes allocation.json and prices.json, plus trajectory.csv for
 * tatonnement, into dir (created if missing). */
IM_API im_status im_solution_write(const im_solution* solution, const char* dir);

/* ---- certificates ----------------------------------------------------- */

typedef struct im_tolerances {
  double feasibility;
  double walras;
  double budget;
  double budget_slack;
  double br_gap;
  double price_sum;
  double auctioneer;
} im_tolerances;

typedef struct im_certificate {
  double feasibility_violation;
  double walras_residual;
  double budget_violation;
  double budget_slack;
  double br_gap;
  double price_sum_gap;
  double auctioneer_gap;
  im_tolerances tolerances;
  int pass;
} im_certificate;

IM_API im_status im_default_tolerances(const im_market* market, const double* prices,
                                       im_tolerances* out);

/* Competitive-equilibrium certificate; tol may be NULL for the defaults.
 * json, if non-NULL, receives the certificate as a JSON document. */
IM_API im_status im_check_ce(const im_market* market, const double* allocation,
                             const double* prices, const im_tolerances* tol, im_certificate* out,
                             char** json);
/* Adds the auctioneer conditions of the pseudo-game. */
IM_API im_status im_check_gne(const im_market* market, const double* allocation,
                              const double* prices, const im_tolerances* tol, im_certificate* out,
                              char** json);

/* ---- batch experiments ------------------------------------------------ */

typedef struct im_experiment_options {
  im_family family;
  size_t buyers;
  size_t goods;
  int num_markets;
  uint64_t seed;
  double edge_prob;
  im_tatonnement_options solver;
  unsigned threads;
} im_experiment_options;

/* 3 buyers, 3 goods, 50 markets, edge probability 0.5 and the family's
 * published hyperparameters. */
IM_API void im_experiment_defaults(im_family family, im_experiment_options* out);

typedef struct im_experiment_report {
  int num_markets;
  int num_passed;
  int num_flagged;
  double pass_rate;
  double reference_constant;
} im_experiment_report;

/* Writes markets/, trajectories/, aggregate.csv and summary.json under
 * out_dir. report may be NULL. */
IM_API im_status im_run_experiment(const im_experiment_options* opts, const char* out_dir,
                                   im_experiment_report* report);

#ifdef __cplusplus
}
#endif

#endif /* INFMARKET_INFMARKET_H */
