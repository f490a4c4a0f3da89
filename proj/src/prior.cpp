#include "hibshrink/prior.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "hibshrink/errors.hpp"
#include "hibshrink/quadrature.hpp"
#include "hibshrink/specfun.hpp"

namespace hibshrink {

namespace {

constexpr double kRemovableBand = 1e-6;

// atanh(u)/u with its Taylor tail near 0.
double atanh_ratio(double u)
{
    if (std::fabs(u) < kRemovableBand) {
        return 1.0 + u * u / 3.0;
    }
    return std::atanh(u) / u;
}

}  // namespace

void HIBParams::validate() const
{
    if (!(a > 0.0) || !(b > 0.0) || !(tau2 > 0.0) || !std::isfinite(a) || !std::isfinite(b)
        || !std::isfinite(tau2)) {
        throw DomainError("HIB prior requires finite a > 0, b > 0, tau2 > 0");
    }
    if (!std::isfinite(s)) {
        throw DomainError("HIB prior requires a finite tilt s");
    }
}

HIBParams half_cauchy()
{
    return {0.5, 0.5, 1.0, 0.0};
}

LogNormalizer log_normalizer(const HIBParams& prior)
{
    prior.validate();
    Phi1Args args;
    args.alpha = prior.b;
    args.beta = 1.0;
    args.gamma = prior.a + prior.b;
    args.x = prior.s;
    args.y = prior.phi1_y();
    return {-prior.s + log_beta(prior.a, prior.b) + phi1(args).log_value};
}

PriorDensity::PriorDensity(const HIBParams& prior)
    : prior_(prior), log_c_(log_normalizer(prior).log_c)
{
}

double PriorDensity::log_kernel(double kappa, double one_minus_kappa) const
{
    const double inv_t2 = 1.0 / prior_.tau2;
    return (prior_.a - 1.0) * std::log(kappa) + (prior_.b - 1.0) * std::log(one_minus_kappa)
           - std::log(inv_t2 + (1.0 - inv_t2) * kappa) - prior_.s * kappa;
}

double PriorDensity::log_kappa(double kappa) const
{
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw DomainError("kappa must lie in (0, 1)");
    }
    return log_kernel(kappa, 1.0 - kappa) - log_c_;
}

double PriorDensity::log_kappa(double kappa, double one_minus_kappa) const
{
    if (!(kappa > 0.0 && kappa <= 1.0 && one_minus_kappa > 0.0 && one_minus_kappa <= 1.0)) {
        throw DomainError("kappa and 1 - kappa must lie in (0, 1)");
    }
    return log_kernel(kappa, one_minus_kappa) - log_c_;
}

double PriorDensity::log_lambda2(double lambda2) const
{
    if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) {
        throw DomainError("lambda^2 must be positive and finite");
    }
    const double kappa = 1.0 / (1.0 + lambda2);
    const double complement = lambda2 / (1.0 + lambda2);
    // d kappa / d lambda^2 = -kappa^2
    return log_kernel(kappa, complement) - log_c_ + 2.0 * std::log(kappa);
}

double PriorDensity::log_lambda(double lambda) const
{
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    return log_lambda2(lambda * lambda) + std::log(2.0 * lambda);
}

double PriorDensity::log_psi(double psi) const
{
    const double lambda2 = std::exp(psi);
    return log_lambda2(lambda2) + psi;
}

double PriorDensity::kappa(double k) const { return std::exp(log_kappa(k)); }
double PriorDensity::kappa(double k, double omk) const { return std::exp(log_kappa(k, omk)); }
double PriorDensity::lambda2(double l2) const { return std::exp(log_lambda2(l2)); }
double PriorDensity::lambda(double l) const { return std::exp(log_lambda(l)); }
double PriorDensity::psi(double p) const { return std::exp(log_psi(p)); }

double density_kappa(const HIBParams& prior, double kappa)
{
    return PriorDensity(prior).kappa(kappa);
}

double density_lambda2(const HIBParams& prior, double lambda2)
{
    return PriorDensity(prior).lambda2(lambda2);
}

double density_lambda(const HIBParams& prior, double lambda)
{
    return PriorDensity(prior).lambda(lambda);
}

double double_half_cauchy_kernel(double lambda)
{
    if (!(lambda > 0.0)) {
        throw DomainError("double half-Cauchy requires lambda > 0");
    }
    const double eps = lambda - 1.0;
    if (std::fabs(eps) < kRemovableBand) {
        return 0.5 - 0.5 * eps;
    }
    return std::log1p(eps) / (eps * (lambda + 1.0));
}

double double_half_cauchy_normalizer()
{
    static std::once_flag once;
    static double normalizer = 0.0;
    std::call_once(once, [] {
        // The kernel behaves like -ln(lambda) at 0 and ln(lambda)/lambda^2 at
        // infinity. Fold (1, inf) onto (0, 1) with lambda -> 1/lambda, where
        // k(1/l) / l^2 = k(l), so the integral is twice the one over (0, 1).
        QuadConfig cfg;
        cfg.abs_tol = 1e-14;
        cfg.rel_tol = 1e-13;
        cfg.max_depth = 60;
        const QuadResult r = integrate_unit(
            std::function<double(double)>([](double l) { return double_half_cauchy_kernel(l); }),
            1.0, 1.0, cfg);
        normalizer = 2.0 * r.value;
    });
    return normalizer;
}

double double_half_cauchy_log_density(double lambda)
{
    return std::log(double_half_cauchy_kernel(lambda)) - std::log(double_half_cauchy_normalizer());
}

double double_half_cauchy_kappa_kernel(double kappa)
{
    if (!(kappa > 0.0 && kappa < 1.0)) {
        throw DomainError("kappa must lie in (0, 1)");
    }
    // ln((1-k)/k) / (1-2k) = 2 atanh(u)/u with u = 1 - 2k.
    const double u = 1.0 - 2.0 * kappa;
    return 2.0 * atanh_ratio(u) / std::sqrt(kappa * (1.0 - kappa));
}

double hyperbolic_secant_density(double psi)
{
    return 0.5 / (std::numbers::pi * std::cosh(0.5 * psi));
}

}  // namespace hibshrink
