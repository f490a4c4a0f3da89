#include "hibshrink/hibshrink.h"

#include <exception>
#include <new>
#include <string>
#include <vector>

#include "hibshrink/errors.hpp"
#include "hibshrink/posterior.hpp"
#include "hibshrink/prior.hpp"
#include "hibshrink/risk.hpp"
#include "hibshrink/sparse.hpp"
#include "hibshrink/specfun.hpp"

struct hib_prior {
    hibshrink::HIBParams params;
};

struct hib_fit {
    hibshrink::ShrinkageFit fit;
};

struct hib_risk_curve {
    std::vector<hibshrink::RiskPoint> points;
};

struct hib_sparse_dataset {
    hibshrink::SparseDataset data;
};

struct hib_profile {
    hibshrink::ProfileResult result;
};

namespace {

thread_local std::string g_last_error;

hib_status fail(hib_status code, const char* what)
{
    g_last_error = what;
    return code;
}

// Runs `body`, mapping library exceptions onto status codes.
template <class F>
hib_status guarded(F&& body)
{
    try {
        body();
        g_last_error.clear();
        return HIB_OK;
    } catch (const hibshrink::Error& e) {
        return fail(static_cast<hib_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(HIB_ERR_NUMERIC, "out of memory");
    } catch (const std::exception& e) {
        return fail(HIB_ERR_NUMERIC, e.what());
    }
}

void fill(const hibshrink::SeriesResult& r, hib_series_result* out)
{
    out->value = r.value;
    out->log_value = r.log_value;
    out->sign = r.sign;
    out->terms_used = r.terms_used;
    out->converged = r.converged ? 1 : 0;
    out->near_singular = r.near_singular ? 1 : 0;
}

hibshrink::Phi1Args phi1_args(double alpha, double beta, double gamma, double x, double y,
                              double rel_tol, size_t max_terms)
{
    hibshrink::Phi1Args a;
    a.alpha = alpha;
    a.beta = beta;
    a.gamma = gamma;
    a.x = x;
    a.y = y;
    if (rel_tol > 0.0) {
        a.control.rel_tol = rel_tol;
    }
    if (max_terms > 0) {
        a.control.max_terms = max_terms;
    }
    return a;
}

template <class Fn>
hib_status run_series(hib_series_result* out, Fn&& fn)
{
    if (out == nullptr) {
        return fail(HIB_ERR_DOMAIN, "null output pointer");
    }
    *out = hib_series_result{};
    try {
        fill(fn(), out);
        g_last_error.clear();
        return HIB_OK;
    } catch (const hibshrink::ConvergenceError& e) {
        out->value = e.partial_value();
        out->terms_used = e.terms_used();
        out->converged = 0;
        return fail(HIB_ERR_CONVERGENCE, e.what());
    } catch (const hibshrink::Error& e) {
        return fail(static_cast<hib_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::exception& e) {
        return fail(HIB_ERR_NUMERIC, e.what());
    }
}

#define HIB_REQUIRE(cond)                                                      \
    do {                                                                       \
        if (!(cond)) {                                                         \
            return fail(HIB_ERR_DOMAIN, "invalid argument: " #cond);           \
        }                                                                      \
    } while (0)

}  // namespace

extern "C" {

const char* hib_version(void)
{
    return HIBSHRINK_VERSION;
}

const char* hib_last_error(void)
{
    return g_last_error.c_str();
}

hib_status hib_phi1(double alpha, double beta, double gamma, double x, double y, double rel_tol,
                    size_t max_terms, hib_series_result* out)
{
    return run_series(out, [&] {
        return hibshrink::phi1(phi1_args(alpha, beta, gamma, x, y, rel_tol, max_terms));
    });
}

hib_status hib_phi1_double_series(double alpha, double beta, double gamma, double x, double y,
                                  double rel_tol, size_t max_terms, hib_series_result* out)
{
    return run_series(out, [&] {
        return hibshrink::phi1_double_series(phi1_args(alpha, beta, gamma, x, y, rel_tol, max_terms));
    });
}

hib_status hib_gauss_2f1(double a, double b, double c, double y, hib_series_result* out)
{
    return run_series(out, [&] { return hibshrink::gauss_2f1(a, b, c, y); });
}

hib_status hib_prior_create(double a, double b, double tau2, double s, hib_prior** out)
{
    HIB_REQUIRE(out != nullptr);
    *out = nullptr;
    return guarded([&] {
        hibshrink::HIBParams p{a, b, tau2, s};
        p.validate();
        *out = new hib_prior{p};
    });
}

hib_status hib_prior_half_cauchy(hib_prior** out)
{
    HIB_REQUIRE(out != nullptr);
    return guarded([&] { *out = new hib_prior{hibshrink::half_cauchy()}; });
}

void hib_prior_destroy(hib_prior* prior)
{
    delete prior;
}

hib_status hib_prior_params(const hib_prior* prior, double* a, double* b, double* tau2, double* s)
{
    HIB_REQUIRE(prior != nullptr);
    if (a) *a = prior->params.a;
    if (b) *b = prior->params.b;
    if (tau2) *tau2 = prior->params.tau2;
    if (s) *s = prior->params.s;
    return HIB_OK;
}

hib_status hib_prior_log_normalizer(const hib_prior* prior, double* out)
{
    HIB_REQUIRE(prior != nullptr && out != nullptr);
    return guarded([&] { *out = hibshrink::log_normalizer(prior->params).log_c; });
}

hib_status hib_prior_density(const hib_prior* prior, hib_density_var var, double value, double* out)
{
    HIB_REQUIRE(prior != nullptr && out != nullptr);
    return guarded([&] {
        const hibshrink::PriorDensity d(prior->params);
        switch (var) {
        case HIB_VAR_LAMBDA:
            *out = d.lambda(value);
            break;
        case HIB_VAR_LAMBDA2:
            *out = d.lambda2(value);
            break;
        case HIB_VAR_KAPPA:
            *out = d.kappa(value);
            break;
        case HIB_VAR_PSI:
            *out = d.psi(value);
            break;
        default:
            throw hibshrink::DomainError("unknown density variable");
        }
    });
}

hib_status hib_shrink(const hib_prior* prior, const double* y, size_t p, double sigma2, hib_fit** out)
{
    HIB_REQUIRE(prior != nullptr && out != nullptr && (y != nullptr || p == 0));
    *out = nullptr;
    return guarded([&] {
        auto fit = hibshrink::shrink(std::span<const double>(y, p), sigma2, prior->params);
        *out = new hib_fit{std::move(fit)};
    });
}

void hib_fit_destroy(hib_fit* fit)
{
    delete fit;
}

size_t hib_fit_dimension(const hib_fit* fit)
{
    return fit ? fit->fit.post_mean.size() : 0;
}

hib_status hib_fit_post_mean(const hib_fit* fit, double* out, size_t n)
{
    HIB_REQUIRE(fit != nullptr && (out != nullptr || n == 0));
    const size_t m = std::min(n, fit->fit.post_mean.size());
    for (size_t i = 0; i < m; ++i) {
        out[i] = fit->fit.post_mean[i];
    }
    return HIB_OK;
}

hib_status hib_fit_summary(const hib_fit* fit, double* kappa_bar, double* post_var_scalar,
                           double* log_marginal)
{
    HIB_REQUIRE(fit != nullptr);
    if (kappa_bar) *kappa_bar = fit->fit.kappa_bar;
    if (post_var_scalar) *post_var_scalar = fit->fit.post_var_scalar;
    if (log_marginal) *log_marginal = fit->fit.log_marginal;
    return HIB_OK;
}

hib_status hib_kappa_moment(const hib_prior* prior, int p, double Z, double sigma2, unsigned n,
                            double* out)
{
    HIB_REQUIRE(prior != nullptr && out != nullptr);
    return guarded([&] {
        *out = hibshrink::kappa_moment(hibshrink::update(prior->params, p, Z, sigma2), n);
    });
}

hib_status hib_risk_curve_compute(const hib_prior* prior, int p, const double* beta_norms,
                                  size_t n_grid, uint64_t n_mc, uint64_t seed, unsigned comparators,
                                  unsigned threads, int quadrature, hib_risk_curve** out)
{
    HIB_REQUIRE(prior != nullptr && out != nullptr && (beta_norms != nullptr || n_grid == 0));
    *out = nullptr;
    return guarded([&] {
        hibshrink::RiskCurveSpec spec;
        spec.p = p;
        spec.beta_norms.assign(beta_norms, beta_norms + n_grid);
        spec.n_mc = static_cast<std::size_t>(n_mc);
        spec.seed = seed;
        spec.prior = prior->params;
        spec.quadrature = quadrature != 0;
        spec.threads = threads == 0 ? 1 : threads;
        if (comparators & HIB_COMPARE_JS) spec.comparators.push_back(hibshrink::Estimator::js);
        if (comparators & HIB_COMPARE_JS_PLUS) spec.comparators.push_back(hibshrink::Estimator::js_plus);
        if (comparators & HIB_COMPARE_MLE) spec.comparators.push_back(hibshrink::Estimator::mle);
        *out = new hib_risk_curve{hibshrink::risk_curve(spec)};
    });
}

void hib_risk_curve_destroy(hib_risk_curve* curve)
{
    delete curve;
}

size_t hib_risk_curve_size(const hib_risk_curve* curve)
{
    return curve ? curve->points.size() : 0;
}

hib_status hib_risk_curve_point(const hib_risk_curve* curve, size_t i, hib_risk_point* out)
{
    HIB_REQUIRE(curve != nullptr && out != nullptr && i < curve->points.size());
    const auto& pt = curve->points[i];
    out->estimator = static_cast<hib_estimator>(static_cast<int>(pt.estimator));
    out->beta_norm = pt.beta_norm;
    out->mse = pt.mse;
    out->mc_std_err = pt.mc_std_err;
    out->n_mc = pt.n_mc;
    return HIB_OK;
}

hib_status hib_js_risk(int p, double beta_norm, double* out)
{
    HIB_REQUIRE(out != nullptr);
    return guarded([&] { *out = hibshrink::js_risk(p, beta_norm); });
}

const char* hib_estimator_name(hib_estimator e)
{
    switch (e) {
    case HIB_EST_HIB:
        return "hib";
    case HIB_EST_JS:
        return "js";
    case HIB_EST_JS_PLUS:
        return "js_plus";
    case HIB_EST_MLE:
        return "mle";
    }
    return "unknown";
}

hib_status hib_sparse_simulate(uint64_t seed, int pure_noise, hib_sparse_dataset** out)
{
    HIB_REQUIRE(out != nullptr);
    *out = nullptr;
    return guarded([&] {
        hibshrink::SparseSimulation sim;
        sim.pure_noise = pure_noise != 0;
        *out = new hib_sparse_dataset{hibshrink::simulate_sparse(seed, sim)};
    });
}

hib_status hib_sparse_from_values(const double* values, size_t rows, size_t n_rep, double sigma,
                                  const double* beta_true, hib_sparse_dataset** out)
{
    HIB_REQUIRE(out != nullptr && values != nullptr && rows > 0 && n_rep > 0);
    *out = nullptr;
    return guarded([&] {
        hibshrink::SparseDataset d;
        d.n_rep = n_rep;
        d.sigma = sigma;
        d.y.assign(values, values + rows * n_rep);
        if (beta_true != nullptr) {
            d.beta_true.assign(beta_true, beta_true + rows);
        } else {
            d.beta_true.assign(rows, 0.0);
        }
        if (!(sigma > 0.0)) {
            throw hibshrink::DomainError("sigma must be positive");
        }
        *out = new hib_sparse_dataset{std::move(d)};
    });
}

void hib_sparse_destroy(hib_sparse_dataset* data)
{
    delete data;
}

hib_status hib_sparse_dims(const hib_sparse_dataset* data, size_t* rows, size_t* n_rep)
{
    HIB_REQUIRE(data != nullptr);
    if (rows) *rows = data->data.rows();
    if (n_rep) *n_rep = data->data.n_rep;
    return HIB_OK;
}

hib_status hib_sparse_value(const hib_sparse_dataset* data, size_t row, size_t rep, double* out)
{
    HIB_REQUIRE(data != nullptr && out != nullptr && row < data->data.rows()
                && rep < data->data.n_rep);
    *out = data->data.at(row, rep);
    return HIB_OK;
}

hib_status hib_marglik_profile(const hib_sparse_dataset* data, uint64_t n_iter, uint64_t burn_in,
                               uint64_t seed, size_t grid_points, hib_profile** out)
{
    HIB_REQUIRE(data != nullptr && out != nullptr && grid_points > 0);
    *out = nullptr;
    return guarded([&] {
        hibshrink::GibbsConfig cfg;
        cfg.n_iter = static_cast<std::size_t>(n_iter);
        cfg.burn_in = static_cast<std::size_t>(burn_in);
        cfg.seed = seed;
        cfg.lambda_grid = hibshrink::default_lambda_grid(grid_points);
        *out = new hib_profile{hibshrink::horseshoe_gibbs(data->data, cfg)};
    });
}

void hib_profile_destroy(hib_profile* profile)
{
    delete profile;
}

size_t hib_profile_size(const hib_profile* profile)
{
    return profile ? profile->result.lambda_grid.size() : 0;
}

hib_status hib_profile_point(const hib_profile* profile, size_t i, double* lambda, double* value,
                             double* half_cauchy, double* ig_induced)
{
    HIB_REQUIRE(profile != nullptr && i < profile->result.lambda_grid.size());
    const auto& r = profile->result;
    if (lambda) *lambda = r.lambda_grid[i];
    if (value) *value = r.profile[i];
    if (half_cauchy) *half_cauchy = r.overlay_half_cauchy[i];
    if (ig_induced) *ig_induced = r.overlay_ig_induced[i];
    return HIB_OK;
}

}  // extern "C"
