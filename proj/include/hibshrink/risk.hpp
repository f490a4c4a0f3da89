#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "hibshrink/prior.hpp"
#include "hibshrink/quadrature.hpp"
#include "hibshrink/rng.hpp"

namespace hibshrink {

enum class Estimator { hib, js, js_plus, mle };

std::string_view estimator_name(Estimator e);

struct RiskPoint {
    double beta_norm = 0.0;
    double mse = 0.0;
    double mc_std_err = 0.0;
    Estimator estimator = Estimator::hib;
    // 0 when the value is exact or computed by quadrature.
    std::size_t n_mc = 0;
};

struct RiskCurveSpec {
    int p = 7;
    std::vector<double> beta_norms;
    std::size_t n_mc = 200000;
    std::uint64_t seed = 0;
    HIBParams prior = half_cauchy();
    std::vector<Estimator> comparators;
    // Expectation over Z by quadrature instead of Monte Carlo for HIB rows.
    bool quadrature = false;
    unsigned threads = 1;
};

/// Z = U^2 + V with U ~ N(|beta|, 1), V ~ chi^2_(p-1): the law of ||y||^2.
class ZSampler {
  public:
    ZSampler(double beta_norm, int p);
    double operator()(Rng& rng);

  private:
    std::normal_distribution<double> normal_;
    std::chi_squared_distribution<double> chi2_;
};

double sample_z(double beta_norm, int p, Rng& rng);

/// Inner expectation of the risk identity,
///   Z m_{p+4}(Z)/m_p(Z) - p g(Z) - (Z/2) g(Z)^2,   g(Z) = E(kappa | Z),
/// with every m-ratio taken from Phi1.
double sure_integrand(const HIBParams& prior, int p, double Z);

/// Same quantity with Z m_{p+4}/m_p replaced by the integration-by-parts form
///   (p + Z + 4) g - (p + 2) - E{2 kappa (1-kappa) p'(kappa)/p(kappa) | Z},
/// the posterior expectation computed by quadrature.
double sure_integrand_ibp(const HIBParams& prior, int p, double Z, const QuadConfig& cfg = {});

/// MSE of the posterior mean through the risk identity, averaging
/// sure_integrand over n_mc draws of Z. Standard error is 2 sd / sqrt(n_mc).
RiskPoint risk_prop1(const HIBParams& prior, int p, double beta_norm, std::size_t n_mc,
                     std::uint64_t seed);

/// As risk_prop1 with E over Z by quadrature against the noncentral chi^2
/// density. Deterministic; mc_std_err is the quadrature error bound.
RiskPoint risk_prop1_quadrature(const HIBParams& prior, int p, double beta_norm,
                                const QuadConfig& cfg = {1e-10, 1e-8, 40});

enum class DirectRule {
    posterior_mean,
    mle,   // kappa_bar forced to 0
    zero,  // kappa_bar forced to 1
    js,
    js_plus,
};

/// MSE by direct simulation: y ~ N(beta, I) with beta = (|beta|, 0, ..., 0).
RiskPoint risk_direct(const HIBParams& prior, int p, double beta_norm, std::size_t n_mc,
                      std::uint64_t seed, DirectRule rule = DirectRule::posterior_mean);

/// Exact James-Stein risk p - (p-2)^2 E[1/(p-2+2K)], K ~ Poisson(|beta|^2/2).
double js_risk(int p, double beta_norm);

struct JsEstimate {
    std::vector<double> value;
    // False when ||y|| = 0 and the plain James-Stein factor is undefined.
    bool defined = true;
};

JsEstimate js_estimate(std::span<const double> y);
std::vector<double> js_plus_estimate(std::span<const double> y);
std::vector<double> mle_estimate(std::span<const double> y);

/// One RiskPoint per (estimator, grid value); HIB rows first, then the
/// comparators in the order given. Output order is independent of threading.
std::vector<RiskPoint> risk_curve(const RiskCurveSpec& spec);

}  // namespace hibshrink
