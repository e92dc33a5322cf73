/* swiptsec: secure SWIPT downlink beamforming optimizer.
 *
 * C interface over the solver core. All functions return an error code
 * (SWIPTSEC_OK on success); string outputs are heap-allocated and must
 * be released with swiptsec_string_free. Error details for the calling
 * thread are available via swiptsec_last_error.
 */

#ifndef SWIPTSEC_H
#define SWIPTSEC_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SWIPTSEC_OK 0
#define SWIPTSEC_ERR_INVALID_ARG 1
#define SWIPTSEC_ERR_PARSE 2
#define SWIPTSEC_ERR_IO 3
#define SWIPTSEC_ERR_INFEASIBLE 4
#define SWIPTSEC_ERR_NUMERICAL 5
#define SWIPTSEC_ERR_INTERNAL 6

/* Opaque scenario handle (parsed configuration, linear units inside). */
typedef struct swiptsec_scenario swiptsec_scenario;

const char* swiptsec_version(void);

/* Thread-local message describing the most recent failure. */
const char* swiptsec_last_error(void);

void swiptsec_string_free(char* s);

/* Scenario lifecycle. Parsing validates every field and reports the
 * offending path in swiptsec_last_error. */
int swiptsec_scenario_parse(const char* json_text, swiptsec_scenario** out);
int swiptsec_scenario_load(const char* path, swiptsec_scenario** out);
int swiptsec_scenario_to_json(const swiptsec_scenario* s, char** json_out);
void swiptsec_scenario_free(swiptsec_scenario* s);

/* Emits the built-in simulation-defaults scenario. */
int swiptsec_default_scenario(char** json_out);

/* One channel draw, one scheme ("optimal", "suboptimal", "baseline1",
 * "baseline2", "benchmark_kappa0"): solve, rank-one recovery, constraint
 * audit. report_json is always produced when the inputs parse; returns
 * SWIPTSEC_ERR_INFEASIBLE / SWIPTSEC_ERR_NUMERICAL for those outcomes
 * (audit_json is empty then). audit_json may be NULL if not wanted. */
int swiptsec_solve_trial(const swiptsec_scenario* s, const char* scheme, uint64_t seed,
                         char** report_json, char** audit_json);

/* Monte Carlo sweep; CSV with one row per (sweep value, scheme).
 * schemes_csv selects a comma-separated subset (NULL: scenario default);
 * trials/jobs/master_seed <= 0 fall back to the scenario values. */
int swiptsec_run_sweep(const swiptsec_scenario* s, const char* schemes_csv, int trials,
                       int jobs, uint64_t master_seed, char** csv_out);

/* Re-evaluates the constraint margins of a previously produced solve
 * report against freshly sampled uncertainty and eavesdropper draws. */
int swiptsec_audit_report(const swiptsec_scenario* s, const char* report_json,
                          char** audit_json);

/* Deterministic chance-constraint replacement data. */
int swiptsec_chance_quantile(int n_t, double kappa, int j, double gamma_tol,
                             double sigma_tilde_sq, double* quantile_coeff,
                             double* rhs_scale);

#ifdef __cplusplus
}
#endif

#endif /* SWIPTSEC_H */
