/* otzero: entropy-regularized transport plans with forbidden entries.
 *
 * C interface of the shared library. Objects are opaque handles created and
 * released by the library; every function that can fail returns an
 * otz_status, with a thread-local message available via otz_last_error().
 * Out-parameters are written only on OTZ_OK.
 */
#ifndef OTZERO_H
#define OTZERO_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum otz_status {
  OTZ_OK = 0,
  OTZ_ERR_ARGUMENT = 1,        /* bad handle, range, or parameter */
  OTZ_ERR_IO = 2,              /* file could not be read or written */
  OTZ_ERR_PARSE = 3,           /* malformed instance/solution file */
  OTZ_ERR_VALIDATION = 4,      /* instance violates its invariants */
  OTZ_ERR_KERNEL_UNDERFLOW = 5,/* kernel entry underflows to zero */
  OTZ_ERR_UNBALANCED = 6,      /* marginal totals differ (exact feasibility) */
  OTZ_ERR_TOO_LARGE = 7,       /* beyond a documented size precondition */
  OTZ_ERR_PATTERN_SAMPLING = 8,/* no valid random pattern found */
  OTZ_ERR_UNSUPPORTED = 9,     /* algorithm precondition not met */
  OTZ_ERR_INTERNAL = 10
} otz_status;

typedef enum otz_algorithm {
  OTZ_ALG1 = 0,
  OTZ_ALG2 = 1,
  OTZ_SK = 2,
  OTZ_CHIZAT = 3
} otz_algorithm;

typedef enum otz_termination {
  OTZ_TERM_CONVERGED = 0,
  OTZ_TERM_MAX_ITERATIONS = 1,
  OTZ_TERM_NUMERICAL_FAILURE = 2
} otz_termination;

typedef struct otz_instance otz_instance;
typedef struct otz_solution otz_solution;

const char* otz_status_name(otz_status s);
/* Message of the last failure on this thread; empty string if none. */
const char* otz_last_error(void);
/* Release a string returned through a char** out-parameter. */
void otz_string_free(char* s);

/* ---- instances ---- */

otz_status otz_instance_read(const char* path, otz_instance** out);
otz_status otz_instance_parse(const char* json_text, otz_instance** out);
otz_status otz_instance_write(const otz_instance* inst, const char* path);
void otz_instance_free(otz_instance* inst);

int otz_instance_rows(const otz_instance* inst);
int otz_instance_cols(const otz_instance* inst);
double otz_instance_gamma0(const otz_instance* inst);
double otz_instance_gamma(const otz_instance* inst);
otz_status otz_instance_set_gamma0(otz_instance* inst, double gamma0);
otz_status otz_instance_set_gamma(otz_instance* inst, double gamma);

/* OTZ_OK if valid. On OTZ_ERR_VALIDATION, *violations_json (optional) gets a
 * JSON array describing every violation found. */
otz_status otz_instance_validate(const otz_instance* inst,
                                 char** violations_json);

/* Fleet charging scenario (uniform data, odd rows barred from odd columns). */
otz_status otz_generate_ev(int m, int n, unsigned long long seed,
                           double gamma0, double gamma, otz_instance** out);
/* Random valid instance with the given forbidden-entry density. */
otz_status otz_generate_random(int m, int n, double zero_density,
                               unsigned long long seed, double gamma0,
                               double gamma, otz_instance** out);

/* Whether a plan with both marginals exact exists on the allowed support.
 * Requires balanced marginals. */
otz_status otz_check_feasibility(const otz_instance* inst, int* feasible);

/* ---- solving ---- */

typedef struct otz_solver_options {
  otz_algorithm algorithm;
  double tol_scaling;  /* scaling-factor deviation tolerance */
  double tol_delta;    /* relative plan-change tolerance */
  long max_iter;
  double gamma1;       /* OTZ_CHIZAT row exponent weight */
  double gamma2;       /* OTZ_CHIZAT column exponent weight */
  long trace_every;
} otz_solver_options;

/* Fill with defaults: OTZ_ALG1, 1e-9, 1e-12, 100000, 1e6, 1.0, 1. */
void otz_solver_options_init(otz_solver_options* opt);

/* Runs the solver to termination. Returns OTZ_OK whenever a solution object
 * was produced -- inspect otz_solution_termination for the outcome. */
otz_status otz_solve(const otz_instance* inst, const otz_solver_options* opt,
                     otz_solution** out);

/* Grid + golden-section reference minimizer for tiny instances. */
otz_status otz_oracle_solve(const otz_instance* inst, otz_solution** out);

/* ---- solutions ---- */

otz_status otz_solution_read(const char* path, otz_solution** out);
otz_status otz_solution_write(const otz_solution* sol, const char* path,
                              int dense_format);
/* JSON text of the solution; release with otz_string_free. */
otz_status otz_solution_to_json(const otz_solution* sol, int dense_format,
                                char** out);
/* CSV of per-iteration metrics; OTZ_ERR_ARGUMENT if the solution carries no
 * trace (e.g. it was loaded from a file). */
otz_status otz_solution_write_trace(const otz_solution* sol, const char* path);
void otz_solution_free(otz_solution* sol);

otz_termination otz_solution_termination(const otz_solution* sol);
int otz_solution_suspected_infeasible(const otz_solution* sol);
long otz_solution_iterations(const otz_solution* sol);
int otz_solution_rows(const otz_solution* sol);
int otz_solution_cols(const otz_solution* sol);
/* Plan entry at (i, j); NaN when the handle is null or out of range. */
double otz_solution_entry(const otz_solution* sol, int i, int j);
otz_status otz_solution_v_star(const otz_solution* sol, double* buf, int len);

/* ---- certification ---- */

typedef struct otz_optimality {
  double fixed_point_residual;
  double row_residual;
  double balance_residual;
  double min_support_entry;
  double min_v_star;
  int positivity_ok; /* 1 iff min_support_entry > 0 */
  int support_components;
} otz_optimality;

/* Pattern zeros, nonnegativity, and the scaling fixed-point residuals of a
 * candidate plan against the instance. */
otz_status otz_check_solution(const otz_instance* inst,
                              const otz_solution* sol, otz_optimality* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OTZERO_H */
