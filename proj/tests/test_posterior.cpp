#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "hibshrink/errors.hpp"
#include "hibshrink/posterior.hpp"
#include "hibshrink/prior.hpp"
#include "hibshrink/quadrature.hpp"
#include "hibshrink/specfun.hpp"

using namespace hibshrink;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double got, double want)
{
    return std::fabs(got - want) / std::fabs(want);
}

std::vector<HIBParams> prior_grid()
{
    std::vector<HIBParams> out;
    for (double a : {0.3, 0.5, 1.0, 2.0}) {
        for (double b : {0.3, 0.5, 1.0, 2.0}) {
            for (double tau2 : {0.25, 1.0, 4.0}) {
                for (double s : {-1.0, 0.0, 3.0}) {
                    out.push_back({a, b, tau2, s});
                }
            }
        }
    }
    return out;
}

// ln of the integral of prod_i N(y_i | 0, sigma2/kappa) p(kappa) over kappa.
double oracle_log_marginal(const std::vector<double>& y, double sigma2, const HIBParams& prior)
{
    const PriorDensity d(prior);
    double Z = 0.0;
    for (double v : y) Z += v * v;
    const double p = static_cast<double>(y.size());
    const double base = -0.5 * p * std::log(2.0 * kPi * sigma2);
    const auto q = integrate_unit(
        [&](double k, double omk) {
            return std::exp(0.5 * p * std::log(k) - 0.5 * Z * k / sigma2 + d.log_kappa(k, omk));
        },
        prior.a + 0.5 * p, prior.b);
    return base + std::log(q.value);
}

}  // namespace

TEST_CASE("update examples")
{
    const auto s1 = update(half_cauchy(), 10, 20.0, 1.0);
    CHECK(s1.a_post == 5.5);
    CHECK(s1.s_post == 10.0);
    CHECK(s1.prior == half_cauchy());
    const HIBParams p{0.7, 1.3, 2.0, -0.4};
    const auto s2 = update(p, 2, 0.0, 1.0);
    CHECK(s2.a_post == p.a + 1.0);
    CHECK(s2.s_post == p.s);
    const auto s3 = update(half_cauchy(), 7, 14.0, 2.0);
    CHECK(s3.a_post == 4.0);
    CHECK(s3.s_post == 3.5);
    CHECK(s3.as_prior() == HIBParams{4.0, 0.5, 1.0, 3.5});
    CHECK_THROWS_AS(update(half_cauchy(), 3, -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(update(half_cauchy(), 3, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(update(half_cauchy(), -1, 1.0, 1.0), DomainError);
}

TEST_CASE("sequential updating equals a single update")
{
    const HIBParams p{0.5, 2.0, 0.25, 1.0};
    const auto one = update(update(p, 3, 4.5, 1.0).as_prior(), 5, 2.25, 1.0);
    const auto both = update(p, 8, 6.75, 1.0);
    CHECK(one.a_post == both.a_post);
    CHECK(one.s_post == both.s_post);
    CHECK(one.prior.b == both.prior.b);
    CHECK(one.prior.tau2 == both.prior.tau2);
}

TEST_CASE("kappa_moment examples")
{
    const auto st = update(half_cauchy(), 10, 20.0, 1.0);
    CHECK(kappa_moment(st, 0) == 1.0);
    CHECK(kappa_moment(update({2.0, 0.3, 4.0, -1.0}, 15, 50.0, 1.0), 0) == 1.0);
    CHECK(kappa_moment(update(half_cauchy(), 0, 0.0, 1.0), 1) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rel(kappa_moment(st, 1), oracle_hib_moment(half_cauchy(), 1, 10, 20.0)) < 1e-6);
    // 30-digit reference.
    CHECK(rel(kappa_moment(st, 1), 0.600531250249755577878620681416) < 1e-10);
    CHECK(rel(kappa_moment(update({1.0, 2.0, 4.0, -1.0}, 15, 5.0, 1.0), 2), 0.613666105252036669987226725569) < 1e-10);
    CHECK(rel(kappa_moment(update({0.5, 0.5, 0.25, 0.0}, 7, 30.0, 1.0), 1), 0.308185346308969115158271122948) < 1e-10);
}

TEST_CASE("kappa moments lie in (0, 1] and decrease in n")
{
    for (const HIBParams& p : prior_grid()) {
        for (double Z : {0.0, 5.0, 50.0}) {
            const auto st = update(p, 7, Z, 1.0);
            double prev = 1.0;
            for (unsigned n = 1; n <= 4; ++n) {
                const double m = kappa_moment(st, n);
                CHECK(m > 0.0);
                CHECK(m <= prev);
                prev = m;
            }
        }
    }
}

TEST_CASE("posterior mean of kappa is strictly decreasing in Z")
{
    for (const HIBParams& p : prior_grid()) {
        double prev = 2.0;
        bool ok = true;
        for (int z = 0; z <= 100; ++z) {
            const double m = kappa_moment(update(p, 7, z, 1.0), 1);
            ok = ok && m < prev;
            prev = m;
        }
        CAPTURE(p.a);
        CAPTURE(p.b);
        CAPTURE(p.tau2);
        CAPTURE(p.s);
        CHECK(ok);
    }
}

TEST_CASE("m-kernel examples and the moment-ratio identity")
{
    CHECK(m_kernel(half_cauchy(), 0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m_kernel(half_cauchy(), 2, 0.0) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(m_kernel(half_cauchy(), 4, 0.0) == doctest::Approx(0.375).epsilon(1e-13));
    for (const HIBParams& p : prior_grid()) {
        for (int dim : {1, 7, 15}) {
            for (double Z : {0.0, 5.0, 50.0}) {
                const double ratio = std::exp(log_m_kernel(p, dim + 2, Z) - log_m_kernel(p, dim, Z));
                CHECK(rel(ratio, kappa_moment(update(p, dim, Z, 1.0), 1)) < 1e-10);
            }
        }
    }
}

TEST_CASE("shrink examples")
{
    SUBCASE("zero data")
    {
        const std::vector<double> y(6, 0.0);
        const auto fit = shrink(y, 1.0, half_cauchy());
        for (double v : fit.post_mean) CHECK(v == 0.0);
        // Z = 0 leaves Beta(a + p/2, b).
        CHECK(rel(fit.kappa_bar, 3.5 / 4.0) < 1e-12);
        CHECK(std::isfinite(fit.log_marginal));
    }
    SUBCASE("constant data")
    {
        const std::vector<double> y(10, 2.0);
        const auto fit = shrink(y, 1.0, half_cauchy());
        CHECK(rel(fit.kappa_bar, 0.286559388929256390796643898857) < 1e-10);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(fit.post_mean[i] == doctest::Approx((1.0 - fit.kappa_bar) * y[i]).epsilon(1e-15));
        }
        CHECK(fit.post_var_scalar == doctest::Approx(1.0 - fit.kappa_bar).epsilon(1e-15));
    }
    SUBCASE("huge signal")
    {
        const std::vector<double> y(10, std::sqrt(1e5));
        const auto fit = shrink(y, 1.0, half_cauchy());
        CHECK(fit.kappa_bar < 1e-4);
        CHECK(fit.kappa_bar > 0.0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            CHECK(std::fabs(fit.post_mean[i] - y[i]) / y[i] < 1e-4);
        }
    }
    SUBCASE("each estimate lies strictly between zero and y")
    {
        const std::vector<double> y{1.5, -0.3, 2.2, 0.0, -4.0, 0.9, 3.1, -1.1, 0.2, 0.7};
        const auto fit = shrink(y, 1.0, half_cauchy());
        CHECK(fit.kappa_bar > 0.0);
        CHECK(fit.kappa_bar < 1.0);
        for (std::size_t i = 0; i < y.size(); ++i) {
            if (y[i] != 0.0) {
                CHECK(std::fabs(fit.post_mean[i]) < std::fabs(y[i]));
                CHECK(fit.post_mean[i] * y[i] > 0.0);
            }
        }
    }
    CHECK_THROWS_AS(shrink(std::vector<double>{}, 1.0, half_cauchy()), DomainError);
    CHECK_THROWS_AS(shrink(std::vector<double>{1.0}, -1.0, half_cauchy()), DomainError);
}

TEST_CASE("Z = 0 with b < 1 stays finite")
{
    for (double b : {0.05, 0.3, 0.5}) {
        const HIBParams p{0.5, b, 0.25, 0.0};
        const std::vector<double> y(3, 0.0);
        const auto fit = shrink(y, 1.0, p);
        CHECK(std::isfinite(fit.kappa_bar));
        CHECK(std::isfinite(fit.log_marginal));
        CHECK(fit.kappa_bar < 1.0);
    }
}

TEST_CASE("marginal log-likelihood")
{
    // p = 1, y = 0, uniform kappa: integral of sqrt(kappa / (2 pi)).
    const HIBParams uniform{1.0, 1.0, 1.0, 0.0};
    const double want = std::log(2.0 / 3.0 / std::sqrt(2.0 * kPi));
    CHECK(rel(marginal_log_likelihood(std::vector<double>{0.0}, 1.0, uniform), want) < 1e-12);
    CHECK(rel(oracle_log_marginal({0.0}, 1.0, uniform), want) < 1e-10);

    // Gaussian scaling identity.
    const std::vector<double> y{1.2, -0.4, 3.3, 0.1};
    const double sigma2 = 2.5;
    std::vector<double> ys;
    for (double v : y) ys.push_back(v / std::sqrt(sigma2));
    for (const HIBParams& p : {half_cauchy(), HIBParams{2.0, 0.3, 0.25, -1.0}}) {
        const double lhs = marginal_log_likelihood(y, sigma2, p);
        const double rhs = marginal_log_likelihood(ys, 1.0, p) - 0.5 * y.size() * std::log(sigma2);
        CHECK(std::fabs(lhs - rhs) < 1e-10);
    }

    // Ten observations of moderate size against the quadrature mixture.
    const std::vector<double> y10{2.1, -0.3, 0.8, 4.2, -1.7, 0.05, 3.0, -2.6, 1.1, 0.4};
    for (const HIBParams& p : {half_cauchy(), HIBParams{1.0, 2.0, 4.0, -1.0}, HIBParams{0.3, 0.5, 0.25, 3.0}}) {
        CHECK(std::fabs(marginal_log_likelihood(y10, 1.0, p) - oracle_log_marginal(y10, 1.0, p)) < 1e-6);
    }
}

TEST_CASE("marginal density integrates to one for p = 1")
{
    for (const HIBParams& p : {half_cauchy(), HIBParams{2.0, 1.0, 0.25, -1.0}}) {
        const auto q = integrate_half_line(
            [&](double y) { return 2.0 * std::exp(marginal_log_likelihood(std::vector<double>{y}, 1.0, p)); },
            {1e-12, 1e-9, 40});
        CHECK(std::fabs(q.value - 1.0) < 1e-6);
    }
}

TEST_CASE("moment-generating function")
{
    const auto st = update(half_cauchy(), 10, 20.0, 1.0);
    CHECK(mgf_kappa(st, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    const double h = 1e-5;
    const double fd = (mgf_kappa(st, h) - mgf_kappa(st, -h)) / (2.0 * h);
    CHECK(std::fabs(fd - kappa_moment(st, 1)) < 1e-6);
    const auto uni = update({1.0, 1.0, 1.0, 0.0}, 0, 0.0, 1.0);
    CHECK(rel(mgf_kappa(uni, 1.0), std::exp(1.0) - 1.0) < 1e-12);
}

TEST_CASE("pooled sigma^2")
{
    const std::vector<double> v{1.0, 2.0, 3.0, 10.0, 10.0, 13.0};
    // Within-row variances 1 and 3, each on 2 degrees of freedom.
    CHECK(pooled_sigma2(v, 2, 3) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(pooled_sigma2(v, 6, 1), DomainError);
    CHECK_THROWS_AS(pooled_sigma2(v, 4, 3), DomainError);
}
