/* C interface to the hibshrink library.
 *
 * Every function returns an hib_status. On failure a message describing the
 * last error on the calling thread is available from hib_last_error().
 * Objects are opaque handles released with the matching *_destroy call;
 * destroy functions accept NULL.
 */
#ifndef HIBSHRINK_H
#define HIBSHRINK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HIB_API __declspec(dllexport)
#else
#define HIB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum hib_status {
    HIB_OK = 0,
    HIB_ERR_NUMERIC = 1,
    HIB_ERR_DOMAIN = 2,
    HIB_ERR_CONVERGENCE = 3
} hib_status;

typedef struct hib_series_result {
    double value;
    double log_value; /* ln|value|, finite even when value overflows */
    int sign;
    size_t terms_used;
    int converged;
    int near_singular;
} hib_series_result;

HIB_API const char* hib_version(void);
HIB_API const char* hib_last_error(void);

/* ---- special functions ---- */

/* rel_tol <= 0 or max_terms == 0 select the defaults (1e-12, 100000).
 * On HIB_ERR_CONVERGENCE `out` holds the partial sum. */
HIB_API hib_status hib_phi1(double alpha, double beta, double gamma, double x, double y,
                            double rel_tol, size_t max_terms, hib_series_result* out);
HIB_API hib_status hib_phi1_double_series(double alpha, double beta, double gamma, double x,
                                          double y, double rel_tol, size_t max_terms,
                                          hib_series_result* out);
HIB_API hib_status hib_gauss_2f1(double a, double b, double c, double y, hib_series_result* out);

/* ---- prior ---- */

typedef struct hib_prior hib_prior;

typedef enum hib_density_var {
    HIB_VAR_LAMBDA = 0,
    HIB_VAR_LAMBDA2 = 1,
    HIB_VAR_KAPPA = 2,
    HIB_VAR_PSI = 3
} hib_density_var;

HIB_API hib_status hib_prior_create(double a, double b, double tau2, double s, hib_prior** out);
HIB_API hib_status hib_prior_half_cauchy(hib_prior** out);
HIB_API void hib_prior_destroy(hib_prior* prior);
HIB_API hib_status hib_prior_params(const hib_prior* prior, double* a, double* b, double* tau2,
                                    double* s);
HIB_API hib_status hib_prior_log_normalizer(const hib_prior* prior, double* out);
HIB_API hib_status hib_prior_density(const hib_prior* prior, hib_density_var var, double value,
                                     double* out);

/* ---- posterior ---- */

typedef struct hib_fit hib_fit;

HIB_API hib_status hib_shrink(const hib_prior* prior, const double* y, size_t p, double sigma2,
                              hib_fit** out);
HIB_API void hib_fit_destroy(hib_fit* fit);
HIB_API size_t hib_fit_dimension(const hib_fit* fit);
/* Copies min(n, dimension) posterior means into out. */
HIB_API hib_status hib_fit_post_mean(const hib_fit* fit, double* out, size_t n);
HIB_API hib_status hib_fit_summary(const hib_fit* fit, double* kappa_bar, double* post_var_scalar,
                                   double* log_marginal);
HIB_API hib_status hib_kappa_moment(const hib_prior* prior, int p, double Z, double sigma2,
                                    unsigned n, double* out);

/* ---- risk ---- */

typedef enum hib_estimator {
    HIB_EST_HIB = 0,
    HIB_EST_JS = 1,
    HIB_EST_JS_PLUS = 2,
    HIB_EST_MLE = 3
} hib_estimator;

/* Comparator bit masks for hib_risk_curve_compute. */
#define HIB_COMPARE_JS (1u << 0)
#define HIB_COMPARE_JS_PLUS (1u << 1)
#define HIB_COMPARE_MLE (1u << 2)

typedef struct hib_risk_point {
    hib_estimator estimator;
    double beta_norm;
    double mse;
    double mc_std_err;
    uint64_t n_mc;
} hib_risk_point;

typedef struct hib_risk_curve hib_risk_curve;

HIB_API hib_status hib_risk_curve_compute(const hib_prior* prior, int p, const double* beta_norms,
                                          size_t n_grid, uint64_t n_mc, uint64_t seed,
                                          unsigned comparators, unsigned threads, int quadrature,
                                          hib_risk_curve** out);
HIB_API void hib_risk_curve_destroy(hib_risk_curve* curve);
HIB_API size_t hib_risk_curve_size(const hib_risk_curve* curve);
HIB_API hib_status hib_risk_curve_point(const hib_risk_curve* curve, size_t i,
                                        hib_risk_point* out);
HIB_API hib_status hib_js_risk(int p, double beta_norm, double* out);
HIB_API const char* hib_estimator_name(hib_estimator e);

/* ---- sparse experiment ---- */

typedef struct hib_sparse_dataset hib_sparse_dataset;
typedef struct hib_profile hib_profile;

/* The canonical 50-row, 3-replicate dataset. */
HIB_API hib_status hib_sparse_simulate(uint64_t seed, int pure_noise, hib_sparse_dataset** out);
/* values is row-major rows x n_rep; beta_true may be NULL (recorded as zeros). */
HIB_API hib_status hib_sparse_from_values(const double* values, size_t rows, size_t n_rep,
                                          double sigma, const double* beta_true,
                                          hib_sparse_dataset** out);
HIB_API void hib_sparse_destroy(hib_sparse_dataset* data);
HIB_API hib_status hib_sparse_dims(const hib_sparse_dataset* data, size_t* rows, size_t* n_rep);
HIB_API hib_status hib_sparse_value(const hib_sparse_dataset* data, size_t row, size_t rep,
                                    double* out);

HIB_API hib_status hib_marglik_profile(const hib_sparse_dataset* data, uint64_t n_iter,
                                       uint64_t burn_in, uint64_t seed, size_t grid_points,
                                       hib_profile** out);
HIB_API void hib_profile_destroy(hib_profile* profile);
HIB_API size_t hib_profile_size(const hib_profile* profile);
HIB_API hib_status hib_profile_point(const hib_profile* profile, size_t i, double* lambda,
                                     double* value, double* half_cauchy, double* ig_induced);

#ifdef __cplusplus
}
#endif

#endif /* HIBSHRINK_H */
