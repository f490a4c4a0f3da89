#pragma once

#include <span>
#include <vector>

#include "hibshrink/prior.hpp"

namespace hibshrink {

// Posterior of lambda^2 given p observations with sum of squares Z and known
// sigma^2. It is again an HIB law with parameters (a_post, b, tau2, s_post).
struct PosteriorState {
    HIBParams prior;
    double a_post = 0.0;  // a + p/2
    double s_post = 0.0;  // s + Z/(2 sigma^2)
    int p = 0;
    double Z = 0.0;
    double sigma2 = 1.0;

    HIBParams as_prior() const { return {a_post, prior.b, prior.tau2, s_post}; }
};

struct ShrinkageFit {
    std::vector<double> post_mean;
    double post_var_scalar = 0.0;
    double kappa_bar = 0.0;
    double log_marginal = 0.0;
};

PosteriorState update(const HIBParams& prior, int p, double Z, double sigma2);

/// E(kappa^n | y, sigma^2) = (a')_n/(a'+b)_n * Phi1(b,1,a'+b+n,s',y)/Phi1(b,1,a'+b,s',y).
double kappa_moment(const PosteriorState& state, unsigned n);

/// ln Phi1(b, 1, gamma, x, 1 - 1/tau2) for the prior's (b, tau2).
double log_phi1_hib(const HIBParams& prior, double gamma, double x);

ShrinkageFit shrink(std::span<const double> y, double sigma2, const HIBParams& prior);

/// ln p(y | sigma^2) with lambda^2 integrated out.
double marginal_log_likelihood(std::span<const double> y, double sigma2, const HIBParams& prior);

/// E exp(t kappa) under the posterior.
double mgf_kappa(const PosteriorState& state, double t);

/// m_p(Z) = \int kappa^(p/2) exp(-Z kappa / 2) p(kappa) d kappa, and its log.
double m_kernel(const HIBParams& prior, unsigned p_eff, double Z);
double log_m_kernel(const HIBParams& prior, unsigned p_eff, double Z);

/// Plug-in sigma^2 from replicated rows (row-major, `rows` x `reps`): the
/// pooled within-row sample variance. Requires reps >= 2.
double pooled_sigma2(std::span<const double> values, std::size_t rows, std::size_t reps);

}  // namespace hibshrink
