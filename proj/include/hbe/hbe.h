/* C interface to the tridiagonal beta-ensemble library.
 *
 * All functions returning hbe_status set a thread-local error message
 * retrievable with hbe_last_error() on failure.  Objects returned through
 * out-parameters are owned by the caller and released with the matching
 * _free function; strings with hbe_string_free.
 */
#ifndef HBE_H
#define HBE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HBE_API __declspec(dllexport)
#else
#define HBE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hbe_status {
  HBE_OK = 0,
  HBE_ERR_PARAM = 2,     /* invalid arguments */
  HBE_ERR_NUMERICAL = 3, /* internal cross-check failed */
  HBE_ERR_IO = 4         /* file system failure */
} hbe_status;

/* Message for the most recent failure on this thread; empty string if none. */
HBE_API const char* hbe_last_error(void);

HBE_API void hbe_string_free(char* s);

/* ---- sampling ---------------------------------------------------------- */

typedef struct hbe_model hbe_model; /* one tridiagonal realization */

HBE_API hbe_status hbe_model_sample(size_t n, double beta, uint64_t seed,
                                    hbe_model** out);
HBE_API void hbe_model_free(hbe_model* model);
HBE_API size_t hbe_model_size(const hbe_model* model);
/* Raw samples of row `index`; *b is set to NaN on the last row. */
HBE_API hbe_status hbe_model_entry(const hbe_model* model, size_t index,
                                   double* a, double* b);
/* CSV dump `index,a,b`. */
HBE_API hbe_status hbe_model_write_csv(const hbe_model* model, const char* path);

/* ---- eigenvalue counting ----------------------------------------------- */

/* Number of eigenvalues strictly below `threshold` (pivot counting). */
HBE_API hbe_status hbe_count_below(const hbe_model* model, double threshold,
                                   size_t* out);
/* Count on (lo, hi]; lo/hi accept -INFINITY / +INFINITY. */
HBE_API hbe_status hbe_count_interval(const hbe_model* model, double lo, double hi,
                                      size_t* out);
/* Same count through the phase-winding representation anchored at bulk
 * position x.  hi = +INFINITY is supported for x = 0 only; lo must be
 * finite. */
HBE_API hbe_status hbe_count_interval_phase(const hbe_model* model, double x,
                                            double lo, double hi, size_t* out);
/* k-th smallest eigenvalue (0-based) within 2*tol. */
HBE_API hbe_status hbe_eigenvalue(const hbe_model* model, size_t k, double tol,
                                  double* out);
/* All n eigenvalues, ascending, into caller-provided storage of size n. */
HBE_API hbe_status hbe_eigenvalues_dense(const hbe_model* model, double tol,
                                         double* out);

/* ---- phase diagnostics -------------------------------------------------- */

/* Forward trajectory dump `l,phi,delta_phi,eta_arg` at local coordinate
 * lambda in the frame at x; cut = 0 selects the default cut index. */
HBE_API hbe_status hbe_phase_trace_csv(const hbe_model* model, double x,
                                       double lambda, size_t cut, const char* path);

/* ---- laws and experiments ---------------------------------------------- */

HBE_API double hbe_semicircle_density(double x);
/* Leading-order variance (4/beta) * log(n) of the accumulated phase. */
HBE_API double hbe_martingale_variance(double n, double beta);

typedef struct hbe_report hbe_report;

HBE_API hbe_status hbe_run_global_law(size_t n, double beta, uint64_t seed,
                                      size_t replicas, size_t threads,
                                      hbe_report** out);
/* engine: "sturm", "phase" or "both".  tn <= 0 resolves to log(n). */
HBE_API hbe_status hbe_run_local_law(size_t n, double beta, uint64_t seed, double x,
                                     double tn, size_t replicas, const char* engine,
                                     size_t threads, hbe_report** out);
HBE_API hbe_status hbe_run_index_clt(size_t n, double beta, uint64_t seed,
                                     size_t replicas, const char* engine,
                                     size_t threads, hbe_report** out);

HBE_API void hbe_report_free(hbe_report* report);
HBE_API size_t hbe_report_replicas(const hbe_report* report);
/* Primary per-replica statistic. */
HBE_API hbe_status hbe_report_statistic(const hbe_report* report, size_t replica,
                                        double* out);
/* Any of the pointers may be NULL. */
HBE_API hbe_status hbe_report_summary(const hbe_report* report, double* mean,
                                      double* variance, double* skewness,
                                      double* excess_kurtosis, double* ks);
/* Replicas on which both engines agreed (engine = "both" runs). */
HBE_API hbe_status hbe_report_agreement(const hbe_report* report, size_t* out);
/* Summary + metadata as a JSON document. */
HBE_API hbe_status hbe_report_json(const hbe_report* report, char** out);
/* Write {experiment}_{n}_{beta}_{seed}.csv/.json into `directory`; either
 * path out-parameter may be NULL. */
HBE_API hbe_status hbe_report_write(const hbe_report* report, const char* directory,
                                    char** csv_path, char** json_path);

/* Least-squares slope of Var(N(0,inf)) against log n.  `json` (optional)
 * receives the full diagnostic document. */
HBE_API hbe_status hbe_variance_slope(const size_t* ns, size_t num_ns, double beta,
                                      size_t replicas_per_n, uint64_t seed,
                                      size_t threads, double* slope, double* slope_se,
                                      char** json);

/* Monte Carlo check of the single-step drift/diffusion predictions at one
 * grid cell; returns a JSON document describing predicted vs empirical
 * moments and the matched scaling variant. */
HBE_API hbe_status hbe_diagnose_moments(size_t n, double beta, double x,
                                        double lambda, double phi_value, size_t l,
                                        size_t samples, uint64_t seed, char** out);

#ifdef __cplusplus
}
#endif

#endif /* HBE_H */
