#ifndef BECOCT_H
#define BECOCT_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define BECOCT_API __declspec(dllexport)
#else
#define BECOCT_API __attribute__((visibility("default")))
#endif

/* Status codes returned by every function that can fail. */
typedef enum becoct_status {
  BECOCT_OK = 0,
  BECOCT_INVALID_ARGUMENT = 1,
  BECOCT_CONFIG_ERROR = 2,
  BECOCT_SOLVER_ERROR = 3,
  BECOCT_LINE_SEARCH_FAILED = 4,
  BECOCT_IO_ERROR = 5
} becoct_status;

/* A validated run configuration plus the results of the last run on it. */
typedef struct becoct_run becoct_run;

typedef void (*becoct_progress_fn)(const char* line, void* user);

BECOCT_API const char* becoct_version(void);

/* Message for the most recent failure on the calling thread ("" if none). */
BECOCT_API const char* becoct_last_error(void);

BECOCT_API becoct_status becoct_run_from_file(const char* path, becoct_run** out);
BECOCT_API becoct_status becoct_run_from_string(const char* json_text, becoct_run** out);
BECOCT_API void becoct_run_free(becoct_run* run);

/* Optional; called with one line of text per progress event. */
BECOCT_API becoct_status becoct_run_set_progress(becoct_run* run, becoct_progress_fn fn, void* user);

BECOCT_API becoct_status becoct_simulate(becoct_run* run, const char* outdir);

/* iterations < 0 uses the configured count. check != 0 also writes check.json.
   Returns BECOCT_LINE_SEARCH_FAILED after writing all artifacts when the line search gave up. */
BECOCT_API becoct_status becoct_optimize(becoct_run* run, const char* outdir, int iterations, int check);

/* Results of the last simulate/optimize call on this run. */
BECOCT_API const char* becoct_run_summary(const becoct_run* run);
BECOCT_API becoct_status becoct_run_final_cost(const becoct_run* run, double* cost);
/* Only after becoct_optimize with check != 0. */
BECOCT_API becoct_status becoct_run_check(const becoct_run* run, double* direct, double* adjoint);

/* Number of Fock states for n atoms in m modes. */
BECOCT_API becoct_status becoct_fock_dimension(int n, int m, size_t* dim);

#ifdef __cplusplus
}
#endif

#endif
