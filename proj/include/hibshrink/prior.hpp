#pragma once

namespace hibshrink {

/// Hypergeometric inverted-beta prior on lambda^2. In the shrinkage weight
/// kappa = 1/(1+lambda^2) the density is proportional to
///   kappa^(a-1) (1-kappa)^(b-1) {1/tau2 + (1 - 1/tau2) kappa}^-1 exp(-s kappa).
struct HIBParams {
    double a = 0.5;     // tail weight
    double b = 0.5;     // mass near the origin
    double tau2 = 1.0;  // global scale
    double s = 0.0;     // exponential tilt

    /// Throws DomainError unless a, b, tau2 > 0 and s is finite.
    void validate() const;

    /// Second argument of every Phi1 call for this prior.
    double phi1_y() const { return 1.0 - 1.0 / tau2; }

    bool operator==(const HIBParams&) const = default;
};

/// a = b = 1/2, tau2 = 1, s = 0: lambda ~ C+(0, 1).
HIBParams half_cauchy();

struct LogNormalizer {
    double log_c = 0.0;
};

/// ln C with C = e^-s Be(a, b) Phi1(b, 1, a+b, s, 1 - 1/tau2).
LogNormalizer log_normalizer(const HIBParams& prior);

/// Normalized prior density with the normalizer computed once.
class PriorDensity {
  public:
    explicit PriorDensity(const HIBParams& prior);

    const HIBParams& params() const { return prior_; }
    double log_c() const { return log_c_; }

    double log_kappa(double kappa) const;
    // Same with the complement supplied, for kappa within rounding of 1.
    double log_kappa(double kappa, double one_minus_kappa) const;
    double log_lambda2(double lambda2) const;
    double log_lambda(double lambda) const;
    // psi = ln lambda^2
    double log_psi(double psi) const;

    double kappa(double kappa) const;
    double kappa(double kappa, double one_minus_kappa) const;
    double lambda2(double lambda2) const;
    double lambda(double lambda) const;
    double psi(double psi) const;

  private:
    // kappa and 1 - kappa passed separately to keep precision at both ends.
    double log_kernel(double kappa, double one_minus_kappa) const;

    HIBParams prior_;
    double log_c_;
};

double density_kappa(const HIBParams& prior, double kappa);
double density_lambda2(const HIBParams& prior, double lambda2);
double density_lambda(const HIBParams& prior, double lambda);

/// Mixing lambda ~ C+(0, tau) over tau ~ C+(0, 1) gives the kernel
/// ln(lambda)/(lambda^2 - 1). The normalizer (pi^2/4) is recomputed by
/// quadrature on first use.
double double_half_cauchy_kernel(double lambda);
double double_half_cauchy_normalizer();
double double_half_cauchy_log_density(double lambda);

/// Unnormalized implied kappa density of the double half-Cauchy,
/// ln((1-kappa)/kappa)/(1-2kappa) / sqrt(kappa(1-kappa)); equals 4 at kappa = 1/2.
double double_half_cauchy_kappa_kernel(double kappa);

/// Density of psi = ln lambda^2 under the half-Cauchy: (1/pi) / (e^(psi/2) + e^(-psi/2)).
double hyperbolic_secant_density(double psi);

}  // namespace hibshrink
