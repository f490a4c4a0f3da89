#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hibshrink/errors.hpp"
#include "hibshrink/posterior.hpp"
#include "hibshrink/quadrature.hpp"
#include "hibshrink/specfun.hpp"

using namespace hibshrink;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double got, double want)
{
    return std::fabs(got - want) / std::fabs(want);
}

}  // namespace

TEST_CASE("integrate_unit closed forms")
{
    const auto one = integrate_unit([](double) { return 1.0; }, 1.0, 1.0);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-14));

    const auto arcsine = integrate_unit(
        [](double k, double omk) { return 1.0 / std::sqrt(k * omk); }, 0.5, 0.5);
    CHECK(rel(arcsine.value, kPi) < 1e-10);
    CHECK(arcsine.abs_error >= std::fabs(arcsine.value - kPi));

    const auto tilted = integrate_unit(
        [](double k, double omk) { return std::exp(-k) / std::sqrt(k * omk); }, 0.5, 0.5);
    Phi1Args a;
    a.alpha = 0.5;
    a.beta = 1.0;
    a.gamma = 1.0;
    a.x = 1.0;
    a.y = 0.0;
    const double via_phi1 = std::exp(-1.0) * kPi * phi1(a).value;
    CHECK(rel(tilted.value, via_phi1) < 1e-10);
}

TEST_CASE("error bound covers the true error")
{
    struct Case {
        double a, b;
    };
    // Beta integrals Be(a, b) for several endpoint exponents.
    for (const Case c : {Case{0.3, 0.5}, Case{0.5, 2.0}, Case{2.0, 0.2}, Case{1.5, 1.5}}) {
        const double want = std::exp(log_beta(c.a, c.b));
        const auto r = integrate_unit(
            [&](double k, double omk) { return std::pow(k, c.a - 1.0) * std::pow(omk, c.b - 1.0); }, c.a, c.b);
        CAPTURE(c.a);
        CAPTURE(c.b);
        CHECK(rel(r.value, want) < 1e-9);
        CHECK(r.abs_error >= std::fabs(r.value - want));
    }
    const auto smooth = integrate_unit([](double k) { return std::cos(3.0 * k); }, 1.0, 1.0);
    CHECK(smooth.abs_error >= std::fabs(smooth.value - std::sin(3.0) / 3.0));
}

TEST_CASE("max_depth exhaustion raises AccuracyError with an estimate")
{
    QuadConfig cfg;
    cfg.max_depth = 1;
    cfg.abs_tol = 1e-15;
    cfg.rel_tol = 1e-15;
    auto peaked = [](double k) { return 1.0 / (1e-6 + (k - 0.3) * (k - 0.3)); };
    try {
        integrate_unit(peaked, 1.0, 1.0, cfg);
        FAIL("expected AccuracyError");
    } catch (const AccuracyError& e) {
        CHECK(std::isfinite(e.estimate()));
        CHECK(e.error_bound() > 0.0);
        CHECK(e.code() == ErrorCode::numeric);
    }
}

TEST_CASE("integrate_half_line")
{
    CHECK(rel(integrate_half_line([](double x) { return std::exp(-x); }).value, 1.0) < 1e-10);
    CHECK(rel(integrate_half_line([](double x) { return 1.0 / (1.0 + x * x); }).value, kPi / 2.0) < 1e-10);
}

TEST_CASE("oracle_hib_moment examples")
{
    CHECK(oracle_hib_moment({0.5, 0.5, 1.0, 0.0}, 1, 0, 0.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(oracle_hib_moment({1.0, 1.0, 1.0, 0.0}, 1, 0, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    // Regression constant, cross-checked with 30-digit quadrature.
    CHECK(rel(oracle_hib_moment({0.5, 0.5, 1.0, 0.0}, 1, 10, 20.0), 0.600531250249755577878620681416) < 1e-9);
    CHECK(oracle_hib_moment({0.5, 0.5, 1.0, 0.0}, 0, 10, 20.0) == 1.0);
}

TEST_CASE("oracle agrees with the Phi1 moment formula on the prior grid")
{
    int checked = 0;
    double worst = 0.0;
    for (double a : {0.3, 0.5, 1.0, 2.0}) {
        for (double b : {0.3, 0.5, 1.0, 2.0}) {
            for (double tau2 : {0.25, 1.0, 4.0}) {
                for (double s : {-1.0, 0.0, 3.0}) {
                    for (int p : {0, 7, 15}) {
                        for (double Z : {0.0, 5.0, 50.0}) {
                            const HIBParams prior{a, b, tau2, s};
                            const double oracle = oracle_hib_moment(prior, 1, p, Z);
                            const double formula = kappa_moment(update(prior, p, Z, 1.0), 1);
                            worst = std::max(worst, rel(formula, oracle));
                            ++checked;
                        }
                    }
                }
            }
        }
    }
    CHECK(checked == 1296);
    CHECK(worst < 1e-6);
}
