#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hibshrink/rng.hpp"

namespace hibshrink {

struct SparseDataset {
    std::vector<double> beta_true;
    std::vector<double> y;  // row-major, rows() x n_rep
    std::size_t n_rep = 3;
    double sigma = 1.0;

    std::size_t rows() const { return beta_true.size(); }
    double at(std::size_t row, std::size_t rep) const { return y[row * n_rep + rep]; }
    std::span<const double> row(std::size_t i) const { return {y.data() + i * n_rep, n_rep}; }
};

/// Five signals (5, 4, 3, 2, 1) followed by 45 zeros.
std::vector<double> canonical_sparse_beta();

struct SparseSimulation {
    std::vector<double> beta_true = canonical_sparse_beta();
    std::size_t n_rep = 3;
    double sigma = 1.0;
    // Draw y_ij ~ N(0, sigma^2) regardless of beta_true.
    bool pure_noise = false;
};

/// y_ij ~ N(beta_i, sigma^2), j = 1..n_rep.
SparseDataset simulate_sparse(std::uint64_t seed, const SparseSimulation& sim = {});

/// ln p(y | lambda, sigma, u^2) with each beta_i ~ N(0, lambda^2 sigma^2 u_i^2)
/// integrated out. Row i is N(0, sigma^2 (I + lambda^2 u_i^2 J)); the rank-one
/// structure gives det = sigma^(2n) (1 + n c) and a closed-form quadratic form.
double conditional_log_likelihood(const SparseDataset& data, double lambda, double sigma,
                                  std::span<const double> u2);

/// 200 equally spaced points on (0, 10].
std::vector<double> default_lambda_grid(std::size_t points = 200);

struct GibbsConfig {
    std::size_t n_iter = 20000;
    std::size_t burn_in = 5000;
    std::uint64_t seed = 0;
    std::vector<double> lambda_grid = default_lambda_grid();
    // Hold lambda at this value instead of sampling it.
    std::optional<double> fixed_lambda;

    void validate() const;
};

/// Running log of the mean of exp(v) over a stream of values.
class LogMeanExp {
  public:
    void add(double v);
    void merge(const LogMeanExp& other);
    double value() const;
    std::size_t count() const { return n_; }

  private:
    double max_ = -std::numeric_limits<double>::infinity();
    double scaled_sum_ = 0.0;  // sum of exp(v - max_)
    std::size_t n_ = 0;
};

/// Gibbs sampler for the horseshoe model with a flat prior for lambda on the
/// grid. Local scales use the parameter expansion
///   u_i^2 | nu_i ~ IG(1/2, 1/nu_i), nu_i ~ IG(1/2, 1),
/// lambda is drawn from p(lambda | u, y) on the grid with beta integrated out,
/// then beta | lambda, u, y is Gaussian.
class HorseshoeSampler {
  public:
    HorseshoeSampler(const SparseDataset& data, const GibbsConfig& cfg);

    void step();

    std::span<const double> beta() const { return beta_; }
    std::span<const double> u2() const { return u2_; }
    double lambda() const { return lambda_; }
    // Conditional log-likelihood on the grid from the latest step.
    std::span<const double> grid_log_likelihood() const { return grid_ll_; }

  private:
    const SparseDataset& data_;
    GibbsConfig cfg_;
    Rng rng_;
    std::vector<double> row_sum_;
    std::vector<double> row_sumsq_;
    std::vector<double> beta_;
    std::vector<double> u2_;
    std::vector<double> nu_;
    std::vector<double> grid_ll_;
    std::vector<double> weights_;
    double lambda_ = 1.0;
};

struct ProfileResult {
    std::vector<double> lambda_grid;
    std::vector<double> profile;        // max is exactly 1
    std::vector<double> log_mean_likelihood;
    std::vector<double> overlay_half_cauchy;
    std::vector<double> overlay_ig_induced;
    std::size_t retained = 0;
};

/// Marginal-likelihood profile over the lambda grid: the pointwise average of
/// the conditional likelihood across post-burn-in draws, rescaled to max 1.
ProfileResult horseshoe_gibbs(const SparseDataset& data, const GibbsConfig& cfg);

/// Build a ProfileResult from per-grid-point accumulators.
ProfileResult finalize_profile(std::span<const double> grid, std::span<const LogMeanExp> acc);

/// Density of lambda when lambda^2 ~ IG(1/2, 1/2).
double ig_induced_density(double lambda);

/// Standard half-Cauchy density 2 / (pi (1 + lambda^2)).
double half_cauchy_lambda_density(double lambda);

}  // namespace hibshrink
