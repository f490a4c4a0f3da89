#pragma once

#include <cstddef>

namespace hibshrink {

struct SeriesControl {
    double rel_tol = 1e-12;
    std::size_t max_terms = 100000;
    // Compensated summation for stress tests.
    bool kahan = false;
};

// Result of a hypergeometric series. `value` may overflow to inf for very
// large arguments; `log_value` (= ln|value|) stays finite in that case.
struct SeriesResult {
    double value = 0.0;
    double log_value = 0.0;
    int sign = 1;
    std::size_t terms_used = 0;
    bool converged = false;
    // y was in [0.999, 1): the series is slow and accuracy may degrade.
    bool near_singular = false;
};

enum class Phi1Method {
    automatic,   // asymptotic expansion for |x| >= 300 when it converges, series otherwise
    series,      // 2F1-series representations only
    asymptotic,  // large-|x| expansion only; ConvergenceError if it cannot reach tolerance
};

struct Phi1Args {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double x = 0.0;
    double y = 0.0;
    SeriesControl control{};
    Phi1Method method = Phi1Method::automatic;
};

inline constexpr double kNearSingularY = 0.999;

/// Rising factorial c(c+1)...(c+n-1); 1 for n = 0.
double pochhammer(double c, unsigned n);

/// ln Gamma(x) for x > 0 (Lanczos, g = 7). Throws DomainError otherwise.
double log_gamma(double x);

double log_beta(double a, double b);

/// Gauss 2F1(a, b; c; y) by direct power series for y in [0, 1); negative y is
/// first mapped into [0, 1) with the Pfaff transformation.
SeriesResult gauss_2f1(double a, double b, double c, double y, const SeriesControl& ctl = {});

/// Humbert's confluent function Phi1(alpha, beta; gamma; x, y), y < 1.
///
/// Representation dispatch:
///   0 <= y < 1, x >= 0 : sum_n (alpha)_n/(gamma)_n x^n/n! 2F1(beta, alpha+n; gamma+n; y)
///   0 <= y < 1, x < 0  : e^x sum_n (gamma-alpha)_n/(gamma)_n (-x)^n/n! 2F1(beta, alpha; gamma+n; y)
///   y < 0              : e^x (1-y)^-beta Phi1(gamma-alpha, beta; gamma; -x, y/(y-1))
/// Every summand in the first two forms is positive for the parameter ranges
/// used by the prior family, so no cancellation occurs even for large |x|.
/// For large |x| the series needs O(|x|) terms, so the automatic method first
/// tries Watson's expansion of the integral representation about the endpoint
/// that dominates (t = 1 for x > 0; x < 0 is reflected through the y < 0
/// identity). It needs gamma > alpha for x > 0.
SeriesResult phi1(const Phi1Args& args);

/// Reference evaluation of Phi1 by the raw double series in (m, n), summed on
/// a growing rectangle in extended precision. For y < 0 the y -> y/(y-1)
/// transformation is applied first so the series converges.
SeriesResult phi1_double_series(const Phi1Args& args);

}  // namespace hibshrink
