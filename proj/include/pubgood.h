/* C interface to the public-good tatonnement library.
 *
 * All functions return pg_status (PG_OK on success); pg_last_error() gives
 * the message for the most recent failure on the calling thread. Objects
 * are opaque handles released with their matching _free function. Strings
 * returned through char** out-parameters are malloc'd; release them with
 * pg_string_free.
 */
#ifndef PUBGOOD_H
#define PUBGOOD_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pg_status {
  PG_OK = 0,
  PG_ERR_INVALID_ARG = 1,
  PG_ERR_PARSE = 2,
  PG_ERR_VALIDATION = 3,
  PG_ERR_DOMAIN = 4,
  PG_ERR_NUMERIC = 5,
  PG_ERR_INDEX = 6,
  PG_ERR_LENGTH = 7,
  PG_ERR_BRACKET = 8,
  PG_ERR_TOO_LARGE = 9,
  PG_ERR_IO = 10,
  PG_ERR_INTERNAL = 11
} pg_status;

typedef enum pg_termination {
  PG_TERM_RESIDUALS_MET = 0,
  PG_TERM_STALLED = 1,
  PG_TERM_MAX_ITERS = 2
} pg_termination;

typedef struct pg_scenario pg_scenario;
typedef struct pg_run pg_run;
typedef struct pg_oracle pg_oracle;

const char* pg_version(void);
const char* pg_last_error(void);
void pg_string_free(char* s);

/* ---- scenarios ---------------------------------------------------------- */

/* Utility evaluator supplied by the embedding program: value U(x,t) and
 * partial derivatives (dU/dx, dU/dt). Must be defined on the agent's box
 * [0,L] x [-T_max_i, w_i] plus a small finite-difference margin. */
typedef double (*pg_utility_value_fn)(double x, double t, void* user);
typedef void (*pg_utility_grad_fn)(double x, double t, double* dx, double* dt, void* user);

pg_status pg_scenario_create(double L, double stepsize_r, pg_scenario** out);
pg_status pg_scenario_add_agent_log_log(pg_scenario* s, double alpha, double w, double a,
                                        double b, double c);
pg_status pg_scenario_add_agent_quad_log(pg_scenario* s, double alpha, double w, double a,
                                         double p, double b, double c);
pg_status pg_scenario_add_agent_external(pg_scenario* s, double alpha, double w,
                                         pg_utility_value_fn value, pg_utility_grad_fn grad,
                                         void* user);

/* Parses a scenario document (see README for the schema). */
pg_status pg_scenario_parse_json(const char* text, pg_scenario** out);
pg_status pg_scenario_load_file(const char* path, pg_scenario** out);
pg_status pg_scenario_to_json(const pg_scenario* s, char** json_out);

/* Checks the model assumptions; the error message lists every violation.
 * Runs implicitly before solving if not called explicitly. */
pg_status pg_scenario_validate(const pg_scenario* s);

size_t pg_scenario_agent_count(const pg_scenario* s);
pg_status pg_scenario_upsilon_bound(const pg_scenario* s, double* out);
void pg_scenario_free(pg_scenario* s);

/* ---- runs --------------------------------------------------------------- */

typedef struct pg_run_options {
  int64_t max_iters;     /* default 100000 */
  int window;            /* stall window, default 500 */
  double eps_feasible;   /* < 0: default 1e-2 * max(1, L) */
  double eps_coherence;  /* < 0: default 1e-2 * max(1, L) */
  double eps_stall;      /* default 1e-6 */
  double mu_step_scale;  /* stepsize multiplier for the mu family, default 1 */
  const double* mu0;     /* initial mu, length m(m-1)/2; NULL = zeros */
  size_t mu0_len;
  double lambda_bound;   /* envelope constant; <= 0 means estimate it */
} pg_run_options;

/* Fills defaults; when the scenario carries a run section from its file,
 * pg_scenario_run_options applies that on top of the defaults. */
void pg_run_options_init(pg_run_options* opts);
pg_status pg_scenario_run_options(const pg_scenario* s, pg_run_options* opts);

pg_status pg_run_execute(const pg_scenario* s, const pg_run_options* opts, pg_run** out);

double pg_run_x_star(const pg_run* r);
double pg_run_g_min(const pg_run* r);
int64_t pg_run_k_min(const pg_run* r);
int64_t pg_run_iterations(const pg_run* r);
pg_termination pg_run_termination(const pg_run* r);
size_t pg_run_agent_count(const pg_run* r);
void pg_run_residuals(const pg_run* r, double* payability, double* coherence);

/* Buffer length must match the value dimension (m for per-agent vectors,
 * m(m-1)/2 for mu). */
pg_status pg_run_x_i(const pg_run* r, double* out, size_t len);
pg_status pg_run_t(const pg_run* r, double* out, size_t len);
pg_status pg_run_lambda(const pg_run* r, double* out, size_t len);
pg_status pg_run_mu(const pg_run* r, double* out, size_t len);
pg_status pg_run_charges(const pg_run* r, double* out, size_t len);

typedef struct pg_trace_row {
  int64_t k;
  double g;
  double g_min;
  double s_norm_sq;
  double r_norm_sq;
  double payability_gap;
  double coherence_gap;
  double zeta;
} pg_trace_row;

size_t pg_run_trace_size(const pg_run* r);
pg_status pg_run_trace_row(const pg_run* r, size_t idx, pg_trace_row* out);
pg_status pg_run_write_trace_csv(const pg_run* r, const char* path);
pg_status pg_run_report_json(const pg_run* r, char** json_out);
void pg_run_free(pg_run* r);

/* ---- centralized oracle -------------------------------------------------- */

/* tol <= 0 selects the default bracket width 1e-8. */
pg_status pg_oracle_solve(const pg_scenario* s, double tol, pg_oracle** out);
double pg_oracle_x(const pg_oracle* o);
double pg_oracle_value(const pg_oracle* o);
double pg_oracle_inner_multiplier(const pg_oracle* o);
pg_status pg_oracle_t(const pg_oracle* o, double* out, size_t len);
void pg_oracle_free(pg_oracle* o);

/* Exhaustive grid verification value (m <= 3): best objective over the
 * (n+1)-point-per-axis grid with the financing constraint enforced. */
pg_status pg_brute_grid_check(const pg_scenario* s, int n, double* out);

/* ---- diagnostics ---------------------------------------------------------- */

/* Full comparison report (run + oracle + gap/bound checks + settlement
 * identities) as JSON. `opts` must be the options the run was executed
 * with; when opts->lambda_bound <= 0 a 10x reference run estimates the
 * envelope constant and the report flags it as estimated. */
pg_status pg_diagnostics_json(const pg_scenario* s, const pg_run* r, const pg_oracle* o,
                              const pg_run_options* opts, char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* PUBGOOD_H */
