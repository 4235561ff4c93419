/*
 * eqlms: LMS-family adaptive filters (LMS, NLMS, q-LMS, q-NLMS,
 * time-varying q-LMS, Eq-LMS) and a Monte-Carlo channel-identification
 * harness, behind a plain C interface.
 *
 * Conventions:
 *   - Every fallible call returns eqlms_status; EQLMS_OK is 0.
 *   - On failure, eqlms_last_error() returns a message for the calling
 *     thread. It stays valid until the next failing call on that thread.
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_destroy function. Destroy functions accept NULL.
 *   - A single handle must not be used from two threads at once. Distinct
 *     handles are independent.
 */
#ifndef EQLMS_EQLMS_H
#define EQLMS_EQLMS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(EQLMS_BUILDING_LIBRARY)
#    define EQLMS_API __declspec(dllexport)
#  else
#    define EQLMS_API __declspec(dllimport)
#  endif
#else
#  define EQLMS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum eqlms_status {
  EQLMS_OK = 0,
  EQLMS_ERR_DIMENSION = 1,  /* length mismatch */
  EQLMS_ERR_DOMAIN = 2,     /* argument outside the function's domain */
  EQLMS_ERR_NUMERIC = 3,    /* non-finite input or division by zero */
  EQLMS_ERR_PARAMETER = 4,  /* invalid hyperparameter */
  EQLMS_ERR_DEGENERATE = 5, /* zero-power or all-zero input */
  EQLMS_ERR_INDEX = 6,
  EQLMS_ERR_DIVERGENCE = 7, /* a run produced non-finite weights */
  EQLMS_ERR_IO = 8,
  EQLMS_ERR_CONFIG = 9,     /* malformed or inconsistent configuration */
  EQLMS_ERR_NULL = 10,      /* required pointer argument was NULL */
  EQLMS_ERR_INTERNAL = 11
} eqlms_status;

typedef enum eqlms_algorithm {
  EQLMS_LMS = 0,
  EQLMS_NLMS = 1,
  EQLMS_QLMS = 2,
  EQLMS_QNLMS = 3,
  EQLMS_TVQLMS = 4,
  EQLMS_EQLMS = 5
} eqlms_algorithm;

EQLMS_API const char* eqlms_version(void);
EQLMS_API const char* eqlms_last_error(void);
EQLMS_API const char* eqlms_status_name(eqlms_status status);

/* ---- filters ----------------------------------------------------------- */

typedef struct eqlms_filter eqlms_filter;

typedef struct eqlms_algorithm_params {
  eqlms_algorithm kind;
  double mu;
  /* q-LMS / q-NLMS: either 1 value (all taps) or one per tap. */
  const double* q_fixed;
  size_t q_fixed_len;
  double beta;       /* time-varying q-LMS */
  double gamma;      /* time-varying q-LMS */
  double zeta;       /* NLMS / q-NLMS regularizer */
  double lambda_max; /* time-varying q-LMS and Eq-LMS; must be > 0 there */
} eqlms_algorithm_params;

/* mu = 0.01, q = 1, beta = 0.9, gamma = 0.1, zeta = 1e-6, lambda_max = 1. */
EQLMS_API eqlms_status eqlms_algorithm_params_default(eqlms_algorithm kind, eqlms_algorithm_params* out);

/* Zero weights, all-ones q-vector, psi = 1. q_fixed is copied. */
EQLMS_API eqlms_status eqlms_filter_create(const eqlms_algorithm_params* params, size_t taps,
                                           eqlms_filter** out);
EQLMS_API void eqlms_filter_destroy(eqlms_filter* filter);

/* One adaptation step on regressor x (x[0] newest) and desired sample d.
 * y and e may be NULL. The state is left untouched on failure. */
EQLMS_API eqlms_status eqlms_filter_step(eqlms_filter* filter, const double* x, size_t n, double d, double* y,
                                         double* e);
EQLMS_API eqlms_status eqlms_filter_predict(const eqlms_filter* filter, const double* x, size_t n, double* y);

EQLMS_API size_t eqlms_filter_taps(const eqlms_filter* filter);
EQLMS_API eqlms_status eqlms_filter_weights(const eqlms_filter* filter, double* out, size_t n);
EQLMS_API eqlms_status eqlms_filter_q_vector(const eqlms_filter* filter, double* out, size_t n);
EQLMS_API eqlms_status eqlms_filter_set_q_vector(eqlms_filter* filter, const double* q, size_t n);
EQLMS_API eqlms_status eqlms_filter_psi(const eqlms_filter* filter, double* out);
EQLMS_API eqlms_status eqlms_filter_iteration(const eqlms_filter* filter, uint64_t* out);

/* ---- signals ----------------------------------------------------------- */

/* Dominant eigenvalue of the taps x taps sample autocorrelation matrix.
 * Requires n >= 10 * taps. */
EQLMS_API eqlms_status eqlms_estimate_lambda_max(const double* samples, size_t n, size_t taps, double* out);

/* n zero-mean Gaussian samples of the given variance from the seeded
 * counter-based stream. */
EQLMS_API eqlms_status eqlms_generate_input(size_t n, uint64_t seed, double variance, double* out);

/* Little-endian float64 file plus "<path>.txt" header (n_samples, seed,
 * variance). */
EQLMS_API eqlms_status eqlms_signal_dump(const char* path, const double* samples, size_t n, uint64_t seed,
                                         double variance);
/* Reads a dump; free *out with eqlms_free. */
EQLMS_API eqlms_status eqlms_signal_load(const char* path, double** out, size_t* n);
EQLMS_API void eqlms_free(void* p);

/* ---- experiments ------------------------------------------------------- */

typedef struct eqlms_report eqlms_report;

typedef struct eqlms_summary_row {
  const char* suite; /* owned by the report */
  const char* label; /* owned by the report */
  eqlms_algorithm algorithm;
  double mu;
  double snr_db;
  size_t n_runs;
  size_t n_iterations;
  double steady_state_db;    /* NaN if diverged */
  double steady_state_se_db; /* standard error, NaN if unavailable */
  int64_t convergence_point; /* -1: never settled or diverged */
  size_t n_divergent_runs;
} eqlms_summary_row;

/* Parses a JSON configuration (same keys as the CLI flags, see README) and
 * plans its suites without running anything. Unknown keys are rejected. */
EQLMS_API eqlms_status eqlms_report_create(const char* config_json, eqlms_report** out);
EQLMS_API void eqlms_report_destroy(eqlms_report* report);

/* Comma-separated list of accepted top-level configuration keys. */
EQLMS_API const char* eqlms_config_keys(void);

/* Fully resolved configuration as JSON; owned by the report. */
EQLMS_API const char* eqlms_report_effective_config(const eqlms_report* report);

/* Runs every suite. workers = 0 uses the "workers" config value (0 there
 * means hardware concurrency). Returns EQLMS_ERR_DIVERGENCE if any entry
 * diverged; the remaining rows are still populated. */
EQLMS_API eqlms_status eqlms_report_execute(eqlms_report* report, unsigned workers);

EQLMS_API size_t eqlms_report_row_count(const eqlms_report* report);
EQLMS_API eqlms_status eqlms_report_row(const eqlms_report* report, size_t index, eqlms_summary_row* out);
/* Ensemble-mean NWD curve of a row; the pointer is owned by the report. */
EQLMS_API eqlms_status eqlms_report_curve(const eqlms_report* report, size_t index, const double** values,
                                          size_t* n);
/* Aligned summary table; owned by the report. Empty before execution. */
EQLMS_API const char* eqlms_report_table(const eqlms_report* report);
/* Writes summary.csv, curves/, runs/ and manifest.json into dir. */
EQLMS_API eqlms_status eqlms_report_export(const eqlms_report* report, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* EQLMS_EQLMS_H */
