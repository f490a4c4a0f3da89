#pragma once

#include <cstddef>
#include <functional>

#include "hibshrink/prior.hpp"

namespace hibshrink {

struct QuadConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_depth = 40;
};

struct QuadResult {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t evaluations = 0;
};

// Integrand on (0, 1). Receives kappa and 1 - kappa separately so that the
// substitution near kappa = 1 does not lose the small complement to rounding.
using UnitIntegrand = std::function<double(double kappa, double one_minus_kappa)>;

/// Integral of f over (0, 1) by globally adaptive 15-point Gauss-Kronrod.
///
/// `a_exp` and `b_exp` are the exponents of the kappa^(a-1) (1-kappa)^(b-1)
/// factors carried by f. When an exponent is below 1 the corresponding half of
/// the interval is integrated in u = kappa^a (or v = (1-kappa)^b), which turns
/// the algebraic endpoint singularity into a smooth integrand.
///
/// Throws AccuracyError, carrying the best estimate and its error bound, when
/// a panel would need bisecting beyond `max_depth`.
QuadResult integrate_unit(const UnitIntegrand& f, double a_exp, double b_exp,
                          const QuadConfig& cfg = {});
QuadResult integrate_unit(const std::function<double(double)>& f, double a_exp, double b_exp,
                          const QuadConfig& cfg = {});

/// Integral over (0, inf) through x = t / (1 - t).
QuadResult integrate_half_line(const std::function<double(double)>& f, const QuadConfig& cfg = {});

/// Largest value of log_f(kappa, 1 - kappa) over a fixed set of points in
/// (0, 1), dense near both ends. Subtracting it before exponentiating keeps
/// sharply tilted kernels well above the absolute tolerance. Pass the kernel
/// with endpoint exponents below 1 clipped, so integrable spikes do not count.
double log_peak_unit(const std::function<double(double, double)>& log_f);

/// E(kappa^n) under the kernel kappa^(a+p/2-1) (1-kappa)^(b-1)
/// {1/tau2 + (1-1/tau2) kappa}^-1 exp(-kappa (s + Z/2)), by direct quadrature.
double oracle_hib_moment(const HIBParams& prior, unsigned n, unsigned p, double Z,
                         const QuadConfig& cfg = {});

}  // namespace hibshrink
