/* plateau - numerical laboratory for flat-gradient learning problems.
 *
 * C API over the C++ core: opaque handles, integer status codes, and
 * experiment runners that write CSV/SVG/JSON artifacts to a directory.
 * All functions return PL_OK (0) on success; on failure they return a
 * nonzero code and pl_error_message() describes the most recent error in
 * the calling thread.
 */

#ifndef PLATEAU_H
#define PLATEAU_H

#include <stddef.h>

#if defined(_WIN32)
#define PLATEAU_API
#elif defined(PLATEAU_BUILDING_SHARED)
#define PLATEAU_API __attribute__((visibility("default")))
#else
#define PLATEAU_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

enum {
  PL_OK = 0,
  PL_ERR_INVALID_ARGUMENT = 1,
  PL_ERR_PARSE = 2,
  PL_ERR_UNSUPPORTED = 3,
  PL_ERR_NUMERIC = 4, /* divergence or a failed internal numeric check */
  PL_ERR_IO = 5,
  PL_ERR_INTERNAL = 6
};

typedef struct pl_mixture pl_mixture;
typedef struct pl_periodic pl_periodic;
typedef struct pl_problem pl_problem;

PLATEAU_API const char* pl_version(void);
PLATEAU_API const char* pl_error_message(void);

/* 0 = use hardware concurrency. Outputs never depend on this value. */
PLATEAU_API int pl_set_workers(int workers);

/* ---- input distributions -------------------------------------------- */

/* spec: {"dim": d, "components": [{"weight": w, "mean": [...],
 *        "cov": {"iso": s} | {"diag": [...]} | {"full": [[...]]}}]} */
PLATEAU_API int pl_mixture_from_json(const char* json, pl_mixture** out);
PLATEAU_API void pl_mixture_free(pl_mixture* m);
PLATEAU_API int pl_mixture_dim(const pl_mixture* m, int* out);
/* out must hold n * dim doubles; row-major, one sample per row. */
PLATEAU_API int pl_mixture_sample(const pl_mixture* m, long long n,
                                  unsigned long long seed, double* out);
PLATEAU_API int pl_mixture_density(const pl_mixture* m, const double* x, int dim,
                                   double* out);
/* Fourier tail ratio eps(r) of one component's square-root density. */
PLATEAU_API int pl_mixture_epsilon(const pl_mixture* m, int component, double r,
                                   double* out);
/* Truncated sum_{n=1}^{n_max} eps(n r) plus a certified remainder bound. */
PLATEAU_API int pl_mixture_epsilon_tail_sum(const pl_mixture* m, int component, double r,
                                            int n_max, double* partial,
                                            double* remainder_bound);

/* ---- periodic targets ------------------------------------------------ */

/* spec: {"kind": "cosine" | "triangle" | "square"}
 *    or {"kind": "pl", "points": [[t0, v0], ...]} with t ascending in [0,1). */
PLATEAU_API int pl_periodic_from_json(const char* json, pl_periodic** out);
PLATEAU_API void pl_periodic_free(pl_periodic* p);
PLATEAU_API int pl_periodic_eval(const pl_periodic* p, double t, double* out);
PLATEAU_API int pl_periodic_fourier_coeff(const pl_periodic* p, int z, double* re,
                                          double* im);

/* ---- learning problems ----------------------------------------------- */

/* family_json: {"kind": "cosine"} | {"kind": "clipped_relu_sum", "units": n}
 *            | {"kind": "one_hidden_relu", "hidden": k} */
PLATEAU_API int pl_problem_create(const char* mixture_json, const char* psi_json,
                                  const char* family_json, const double* wstar, int dim,
                                  pl_problem** out);
PLATEAU_API void pl_problem_free(pl_problem* p);
PLATEAU_API int pl_problem_param_dim(const pl_problem* p, int* out);
PLATEAU_API int pl_problem_objective_mc(const pl_problem* p, const double* w, int dim,
                                        long long n, unsigned long long seed,
                                        double* value, double* std_error);
/* PL_ERR_UNSUPPORTED unless cosine family, cosine target, zero means. */
PLATEAU_API int pl_problem_objective_closed(const pl_problem* p, const double* w, int dim,
                                            double* value);
PLATEAU_API int pl_problem_grad_closed(const pl_problem* p, const double* w, int dim,
                                       double* out);
PLATEAU_API int pl_problem_grad_mc(const pl_problem* p, const double* w, int dim,
                                   long long n, unsigned long long seed, double* out,
                                   double* std_error_out);

/* ---- experiment runners ---------------------------------------------- */

/* config_json is merged over built-in defaults ("seed" is mandatory);
 * outputs plus the effective config are written under out_dir.
 * verdict_out (may be NULL) receives 1 for pass, 0 for a failed verdict;
 * runners without a verdict always report 1. */
PLATEAU_API int pl_run_landscape(const char* config_json, const char* out_dir,
                                 int* verdict_out);
PLATEAU_API int pl_run_variance_scan(const char* config_json, const char* out_dir,
                                     int* verdict_out);
PLATEAU_API int pl_run_trajectory(const char* config_json, const char* out_dir,
                                  int* verdict_out);
PLATEAU_API int pl_run_invariance(const char* config_json, const char* out_dir,
                                  int* verdict_out);
PLATEAU_API int pl_run_reduction_check(const char* config_json, const char* out_dir,
                                       int* verdict_out);

/* Effective (defaults-merged) config for a subcommand given a user config;
 * writes a NUL-terminated JSON string into buf (truncating if needed) and
 * returns the full length through len. */
PLATEAU_API int pl_effective_config(const char* subcommand, const char* config_json,
                                    char* buf, size_t buf_size, size_t* len);

#ifdef __cplusplus
}
#endif

#endif /* PLATEAU_H */
