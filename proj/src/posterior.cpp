#include "hibshrink/posterior.hpp"

#include <cmath>
#include <numbers>

#include "hibshrink/errors.hpp"
#include "hibshrink/specfun.hpp"

namespace hibshrink {

namespace {

double sum_of_squares(std::span<const double> y)
{
    double z = 0.0;
    for (double v : y) {
        if (!std::isfinite(v)) {
            throw DomainError("observations must be finite");
        }
        z += v * v;
    }
    return z;
}

void check_sigma2(double sigma2)
{
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
        throw DomainError("sigma^2 must be positive and finite");
    }
}

// (a)_n / (c)_n as a product of ratios.
double pochhammer_ratio(double a, double c, unsigned n)
{
    double r = 1.0;
    for (unsigned k = 0; k < n; ++k) {
        r *= (a + k) / (c + k);
    }
    return r;
}

}  // namespace

PosteriorState update(const HIBParams& prior, int p, double Z, double sigma2)
{
    prior.validate();
    check_sigma2(sigma2);
    if (p < 0) {
        throw DomainError("dimension p must be non-negative");
    }
    if (!(Z >= 0.0) || !std::isfinite(Z)) {
        throw DomainError("Z must be non-negative and finite");
    }
    PosteriorState st;
    st.prior = prior;
    st.a_post = prior.a + 0.5 * p;
    st.s_post = prior.s + Z / (2.0 * sigma2);
    st.p = p;
    st.Z = Z;
    st.sigma2 = sigma2;
    return st;
}

double log_phi1_hib(const HIBParams& prior, double gamma, double x)
{
    Phi1Args args;
    args.alpha = prior.b;
    args.beta = 1.0;
    args.gamma = gamma;
    args.x = x;
    args.y = prior.phi1_y();
    return phi1(args).log_value;
}

double kappa_moment(const PosteriorState& state, unsigned n)
{
    if (n == 0) {
        return 1.0;
    }
    const HIBParams& pr = state.prior;
    const double gamma = state.a_post + pr.b;
    const double log_ratio = log_phi1_hib(pr, gamma + n, state.s_post)
                             - log_phi1_hib(pr, gamma, state.s_post);
    return pochhammer_ratio(state.a_post, gamma, n) * std::exp(log_ratio);
}

double marginal_log_likelihood(std::span<const double> y, double sigma2, const HIBParams& prior)
{
    if (y.empty()) {
        throw DomainError("need at least one observation");
    }
    const double Z = sum_of_squares(y);
    const PosteriorState st = update(prior, static_cast<int>(y.size()), Z, sigma2);
    const double p = static_cast<double>(y.size());
    return -0.5 * p * std::log(2.0 * std::numbers::pi * sigma2) - Z / (2.0 * sigma2)
           + log_beta(st.a_post, prior.b) - log_beta(prior.a, prior.b)
           + log_phi1_hib(prior, st.a_post + prior.b, st.s_post)
           - log_phi1_hib(prior, prior.a + prior.b, prior.s);
}

ShrinkageFit shrink(std::span<const double> y, double sigma2, const HIBParams& prior)
{
    if (y.empty()) {
        throw DomainError("need at least one observation");
    }
    const double Z = sum_of_squares(y);
    const PosteriorState st = update(prior, static_cast<int>(y.size()), Z, sigma2);
    ShrinkageFit fit;
    fit.kappa_bar = kappa_moment(st, 1);
    fit.post_mean.reserve(y.size());
    for (double v : y) {
        fit.post_mean.push_back((1.0 - fit.kappa_bar) * v);
    }
    fit.post_var_scalar = (1.0 - fit.kappa_bar) * sigma2;
    fit.log_marginal = marginal_log_likelihood(y, sigma2, prior);
    return fit;
}

double mgf_kappa(const PosteriorState& state, double t)
{
    if (t == 0.0) {
        return 1.0;
    }
    const HIBParams& pr = state.prior;
    const double gamma = state.a_post + pr.b;
    return std::exp(t + log_phi1_hib(pr, gamma, state.s_post - t)
                    - log_phi1_hib(pr, gamma, state.s_post));
}

double log_m_kernel(const HIBParams& prior, unsigned p_eff, double Z)
{
    if (!(Z >= 0.0) || !std::isfinite(Z)) {
        throw DomainError("Z must be non-negative and finite");
    }
    const HIBParams tilted{prior.a + 0.5 * p_eff, prior.b, prior.tau2, prior.s + 0.5 * Z};
    return log_normalizer(tilted).log_c - log_normalizer(prior).log_c;
}

double m_kernel(const HIBParams& prior, unsigned p_eff, double Z)
{
    return std::exp(log_m_kernel(prior, p_eff, Z));
}

double pooled_sigma2(std::span<const double> values, std::size_t rows, std::size_t reps)
{
    if (reps < 2 || rows == 0 || values.size() != rows * reps) {
        throw DomainError("pooled sigma^2 needs rows x reps values with reps >= 2");
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto row = values.subspan(i * reps, reps);
        double mean = 0.0;
        for (double v : row) {
            mean += v;
        }
        mean /= static_cast<double>(reps);
        for (double v : row) {
            ss += (v - mean) * (v - mean);
        }
    }
    return ss / static_cast<double>(rows * (reps - 1));
}

}  // namespace hibshrink
