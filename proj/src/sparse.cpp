#include "hibshrink/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hibshrink/errors.hpp"
#include "hibshrink/prior.hpp"

namespace hibshrink {

namespace {

constexpr double kLambdaUpper = 10.0;

double log_row_marginal(double sum, double sumsq, std::size_t n, double c, double sigma2)
{
    const double dn = static_cast<double>(n);
    const double quad = sumsq - c * sum * sum / (1.0 + dn * c);
    return -0.5 * dn * std::log(2.0 * std::numbers::pi * sigma2) - 0.5 * std::log1p(dn * c)
           - 0.5 * quad / sigma2;
}

void check_dataset(const SparseDataset& d)
{
    if (d.rows() == 0 || d.n_rep == 0 || d.y.size() != d.rows() * d.n_rep) {
        throw DomainError("sparse dataset has inconsistent dimensions");
    }
    if (!(d.sigma > 0.0)) {
        throw DomainError("sparse dataset sigma must be positive");
    }
}

}  // namespace

std::vector<double> canonical_sparse_beta()
{
    std::vector<double> beta(50, 0.0);
    for (int i = 0; i < 5; ++i) {
        beta[i] = 5.0 - i;
    }
    return beta;
}

SparseDataset simulate_sparse(std::uint64_t seed, const SparseSimulation& sim)
{
    if (sim.beta_true.empty() || sim.n_rep == 0 || !(sim.sigma > 0.0)) {
        throw DomainError("invalid sparse simulation settings");
    }
    SparseDataset d;
    d.beta_true = sim.beta_true;
    d.n_rep = sim.n_rep;
    d.sigma = sim.sigma;
    d.y.reserve(d.rows() * d.n_rep);
    Rng rng = Rng::stream(seed, {0x5be});
    std::normal_distribution<double> noise(0.0, sim.sigma);
    for (std::size_t i = 0; i < d.rows(); ++i) {
        const double mean = sim.pure_noise ? 0.0 : d.beta_true[i];
        for (std::size_t j = 0; j < d.n_rep; ++j) {
            d.y.push_back(mean + noise(rng));
        }
    }
    return d;
}

double conditional_log_likelihood(const SparseDataset& data, double lambda, double sigma,
                                  std::span<const double> u2)
{
    check_dataset(data);
    if (u2.size() != data.rows()) {
        throw DomainError("u2 must have one entry per row");
    }
    if (!(lambda >= 0.0) || !(sigma > 0.0)) {
        throw DomainError("lambda must be non-negative and sigma positive");
    }
    const double sigma2 = sigma * sigma;
    const double l2 = lambda * lambda;
    double total = 0.0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
        double sum = 0.0;
        double sumsq = 0.0;
        for (double v : data.row(i)) {
            sum += v;
            sumsq += v * v;
        }
        total += log_row_marginal(sum, sumsq, data.n_rep, l2 * u2[i], sigma2);
    }
    return total;
}

std::vector<double> default_lambda_grid(std::size_t points)
{
    std::vector<double> grid(points);
    for (std::size_t k = 0; k < points; ++k) {
        grid[k] = kLambdaUpper * static_cast<double>(k + 1) / static_cast<double>(points);
    }
    return grid;
}

void GibbsConfig::validate() const
{
    if (n_iter == 0 || burn_in >= n_iter) {
        throw DomainError("Gibbs config needs n_iter > burn_in");
    }
    if (lambda_grid.empty()) {
        throw DomainError("lambda grid is empty");
    }
    for (std::size_t k = 0; k < lambda_grid.size(); ++k) {
        if (!(lambda_grid[k] > 0.0) || (k > 0 && !(lambda_grid[k] > lambda_grid[k - 1]))) {
            throw DomainError("lambda grid must be positive and strictly ascending");
        }
    }
    if (lambda_grid.back() > kLambdaUpper) {
        throw DomainError("lambda grid exceeds the truncation point 10");
    }
    if (fixed_lambda && !(*fixed_lambda > 0.0)) {
        throw DomainError("fixed lambda must be positive");
    }
}

void LogMeanExp::add(double v)
{
    if (!std::isfinite(v)) {
        throw NumericError("non-finite conditional log-likelihood");
    }
    ++n_;
    if (v > max_) {
        scaled_sum_ = scaled_sum_ * std::exp(max_ - v) + 1.0;
        max_ = v;
    } else {
        scaled_sum_ += std::exp(v - max_);
    }
}

void LogMeanExp::merge(const LogMeanExp& other)
{
    if (other.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double m = std::max(max_, other.max_);
    scaled_sum_ = scaled_sum_ * std::exp(max_ - m) + other.scaled_sum_ * std::exp(other.max_ - m);
    max_ = m;
    n_ += other.n_;
}

double LogMeanExp::value() const
{
    if (n_ == 0) {
        return -std::numeric_limits<double>::infinity();
    }
    return max_ + std::log(scaled_sum_) - std::log(static_cast<double>(n_));
}

HorseshoeSampler::HorseshoeSampler(const SparseDataset& data, const GibbsConfig& cfg)
    : data_(data), cfg_(cfg), rng_(Rng::stream(cfg.seed, {0x61bb}))
{
    check_dataset(data);
    cfg.validate();
    const std::size_t p = data.rows();
    row_sum_.assign(p, 0.0);
    row_sumsq_.assign(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        for (double v : data.row(i)) {
            row_sum_[i] += v;
            row_sumsq_[i] += v * v;
        }
    }
    beta_.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        beta_[i] = row_sum_[i] / static_cast<double>(data.n_rep);
    }
    u2_.assign(p, 1.0);
    nu_.assign(p, 1.0);
    grid_ll_.assign(cfg.lambda_grid.size(), 0.0);
    weights_.assign(cfg.lambda_grid.size(), 0.0);
    lambda_ = cfg.fixed_lambda.value_or(1.0);
}

void HorseshoeSampler::step()
{
    const std::size_t p = data_.rows();
    const double sigma2 = data_.sigma * data_.sigma;
    const double n = static_cast<double>(data_.n_rep);
    std::exponential_distribution<double> expo(1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Local scales: IG(1, b) draws are b / Exp(1).
    for (std::size_t i = 0; i < p; ++i) {
        const double rate = 1.0 / nu_[i] + beta_[i] * beta_[i] / (2.0 * lambda_ * lambda_ * sigma2);
        u2_[i] = rate / expo(rng_);
        nu_[i] = (1.0 + 1.0 / u2_[i]) / expo(rng_);
    }

    // Global scale on the grid, beta collapsed. Only the lambda-dependent
    // part of each row marginal is summed in the inner loop.
    double base = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        base += log_row_marginal(row_sum_[i], row_sumsq_[i], data_.n_rep, 0.0, sigma2);
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid_ll_.size(); ++g) {
        const double l2 = cfg_.lambda_grid[g] * cfg_.lambda_grid[g];
        double acc = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            const double c = l2 * u2_[i];
            const double t = n * c;
            acc += std::log1p(t) - c * row_sum_[i] * row_sum_[i] / (sigma2 * (1.0 + t));
        }
        const double ll = base - 0.5 * acc;
        if (!std::isfinite(ll)) {
            throw NumericError("non-finite conditional log-likelihood");
        }
        grid_ll_[g] = ll;
        best = std::max(best, ll);
    }
    if (!cfg_.fixed_lambda) {
        double total = 0.0;
        for (std::size_t g = 0; g < grid_ll_.size(); ++g) {
            total += std::exp(grid_ll_[g] - best);
            weights_[g] = total;
        }
        const double target = rng_.uniform() * total;
        const auto it = std::lower_bound(weights_.begin(), weights_.end(), target);
        lambda_ = cfg_.lambda_grid[std::min<std::size_t>(it - weights_.begin(), grid_ll_.size() - 1)];
    }

    // Means.
    for (std::size_t i = 0; i < p; ++i) {
        const double prior_var = lambda_ * lambda_ * sigma2 * u2_[i];
        const double precision = n / sigma2 + 1.0 / prior_var;
        const double mean = (row_sum_[i] / sigma2) / precision;
        beta_[i] = mean + normal(rng_) / std::sqrt(precision);
    }
}

ProfileResult finalize_profile(std::span<const double> grid, std::span<const LogMeanExp> acc)
{
    ProfileResult r;
    r.lambda_grid.assign(grid.begin(), grid.end());
    r.log_mean_likelihood.reserve(acc.size());
    for (const auto& a : acc) {
        r.log_mean_likelihood.push_back(a.value());
    }
    const double top = *std::max_element(r.log_mean_likelihood.begin(), r.log_mean_likelihood.end());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        r.profile.push_back(std::exp(r.log_mean_likelihood[g] - top));
        r.overlay_half_cauchy.push_back(half_cauchy_lambda_density(grid[g]));
        r.overlay_ig_induced.push_back(ig_induced_density(grid[g]));
    }
    r.retained = acc.empty() ? 0 : acc.front().count();
    return r;
}

ProfileResult horseshoe_gibbs(const SparseDataset& data, const GibbsConfig& cfg)
{
    HorseshoeSampler chain(data, cfg);
    std::vector<LogMeanExp> acc(cfg.lambda_grid.size());
    for (std::size_t it = 0; it < cfg.n_iter; ++it) {
        chain.step();
        if (it < cfg.burn_in) {
            continue;
        }
        const auto ll = chain.grid_log_likelihood();
        for (std::size_t g = 0; g < acc.size(); ++g) {
            acc[g].add(ll[g]);
        }
    }
    return finalize_profile(cfg.lambda_grid, acc);
}

double ig_induced_density(double lambda)
{
    if (!(lambda > 0.0)) {
        throw DomainError("lambda must be positive");
    }
    // 2 lambda * (1/2)^(1/2) / Gamma(1/2) * lambda^-3 * exp(-1/(2 lambda^2))
    const double log_d = 0.5 * std::log(2.0 / std::numbers::pi) - 2.0 * std::log(lambda)
                         - 0.5 / (lambda * lambda);
    return std::exp(log_d);
}

double half_cauchy_lambda_density(double lambda)
{
    if (!(lambda >= 0.0)) {
        throw DomainError("lambda must be non-negative");
    }
    return 2.0 / (std::numbers::pi * (1.0 + lambda * lambda));
}

}  // namespace hibshrink
