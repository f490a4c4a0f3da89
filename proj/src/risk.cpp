#include "hibshrink/risk.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "hibshrink/errors.hpp"
#include "hibshrink/posterior.hpp"
#include "hibshrink/specfun.hpp"

namespace hibshrink {

namespace {

// Stream ids, one per simulation kind.
constexpr std::uint64_t kStreamProp1 = 1;
constexpr std::uint64_t kStreamDirect = 2;

// Welford running mean and variance.
class RunningStats {
  public:
    void add(double x)
    {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    std::size_t count() const { return n_; }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

void check_p(int p, int min_p)
{
    if (p < min_p) {
        throw DomainError("dimension p must be at least " + std::to_string(min_p));
    }
}

void check_beta_norm(double beta_norm)
{
    if (!(beta_norm >= 0.0) || !std::isfinite(beta_norm)) {
        throw DomainError("beta_norm must be non-negative and finite");
    }
}

// E(kappa | Z) and E(kappa^2 | Z) together; they share the base Phi1.
struct KappaMoments {
    double first;
    double second;
};

KappaMoments kappa_moments(const HIBParams& prior, int p, double Z)
{
    const double a = prior.a + 0.5 * p;
    const double gamma = a + prior.b;
    const double x = prior.s + 0.5 * Z;
    const double l0 = log_phi1_hib(prior, gamma, x);
    const double l1 = log_phi1_hib(prior, gamma + 1.0, x);
    const double l2 = log_phi1_hib(prior, gamma + 2.0, x);
    const double r1 = a / gamma;
    const double r2 = r1 * (a + 1.0) / (gamma + 1.0);
    return {r1 * std::exp(l1 - l0), r2 * std::exp(l2 - l0)};
}

// Poisson(mean) weights visited outward from the mode until both tails fall
// below `tail` relative to the mode weight. Weights decrease monotonically
// away from the mode in both directions.
template <class F>
void poisson_sum(double mean, double tail, F&& visit)
{
    if (mean == 0.0) {
        visit(0u, 1.0);
        return;
    }
    const unsigned mode = static_cast<unsigned>(std::floor(mean));
    const double log_w_mode = -mean + mode * std::log(mean) - log_gamma(mode + 1.0);
    const double w_mode = std::exp(log_w_mode);
    visit(mode, w_mode);
    double w = w_mode;
    for (unsigned k = mode; k > 0; --k) {
        w *= static_cast<double>(k) / mean;
        visit(k - 1, w);
        if (w < tail * w_mode) {
            break;
        }
    }
    w = w_mode;
    for (unsigned k = mode + 1;; ++k) {
        w *= mean / static_cast<double>(k);
        visit(k, w);
        if (w < tail * w_mode) {
            break;
        }
    }
}

double log_chi2_pdf(double z, double dof)
{
    const double h = 0.5 * dof;
    return (h - 1.0) * std::log(z) - 0.5 * z - h * std::numbers::ln2 - log_gamma(h);
}

double noncentral_chi2_pdf(double z, int p, double noncentrality)
{
    if (z <= 0.0) {
        return 0.0;
    }
    double total = 0.0;
    poisson_sum(0.5 * noncentrality, 1e-17, [&](unsigned k, double w) {
        total += w * std::exp(log_chi2_pdf(z, p + 2.0 * k));
    });
    return total;
}

}  // namespace

std::string_view estimator_name(Estimator e)
{
    switch (e) {
    case Estimator::hib:
        return "hib";
    case Estimator::js:
        return "js";
    case Estimator::js_plus:
        return "js_plus";
    case Estimator::mle:
        return "mle";
    }
    return "unknown";
}

ZSampler::ZSampler(double beta_norm, int p)
{
    check_p(p, 2);
    check_beta_norm(beta_norm);
    normal_ = std::normal_distribution<double>(beta_norm, 1.0);
    chi2_ = std::chi_squared_distribution<double>(static_cast<double>(p - 1));
}

double ZSampler::operator()(Rng& rng)
{
    const double u = normal_(rng);
    return u * u + chi2_(rng);
}

double sample_z(double beta_norm, int p, Rng& rng)
{
    return ZSampler(beta_norm, p)(rng);
}

double sure_integrand(const HIBParams& prior, int p, double Z)
{
    prior.validate();
    check_p(p, 1);
    const KappaMoments m = kappa_moments(prior, p, Z);
    return Z * m.second - p * m.first - 0.5 * Z * m.first * m.first;
}

double sure_integrand_ibp(const HIBParams& prior, int p, double Z, const QuadConfig& cfg)
{
    prior.validate();
    check_p(p, 1);
    const double g = kappa_moments(prior, p, Z).first;

    const double a_post = prior.a + 0.5 * p;
    const double tilt = prior.s + 0.5 * Z;
    const double inv_t2 = 1.0 / prior.tau2;
    auto log_weight = [=](double k, double c) {
        return (a_post - 1.0) * std::log(k) + (prior.b - 1.0) * std::log(c)
               - std::log(inv_t2 + (1.0 - inv_t2) * k) - tilt * k;
    };
    const double shift = log_peak_unit([=](double k, double c) {
        return std::max(a_post - 1.0, 0.0) * std::log(k) + std::max(prior.b - 1.0, 0.0) * std::log(c)
               - std::log(inv_t2 + (1.0 - inv_t2) * k) - tilt * k;
    });
    auto weight = [=](double k, double c) {
        if (k <= 0.0 || c <= 0.0) {
            return 0.0;
        }
        return std::exp(log_weight(k, c) - shift);
    };
    // 2 kappa (1-kappa) d/dkappa ln p(kappa), multiplied through so each term is bounded.
    auto score = [=](double k, double c) {
        const double bracket = inv_t2 + (1.0 - inv_t2) * k;
        return 2.0 * ((prior.a - 1.0) * c - (prior.b - 1.0) * k - prior.s * k * c
                      - (1.0 - inv_t2) * k * c / bracket);
    };
    const QuadResult den = integrate_unit(UnitIntegrand(weight), a_post, prior.b, cfg);
    const QuadResult num = integrate_unit(
        UnitIntegrand([&](double k, double c) { return weight(k, c) * score(k, c); }),
        a_post, prior.b, cfg);
    const double z_ratio = (p + Z + 4.0) * g - (p + 2.0) - num.value / den.value;
    return z_ratio - p * g - 0.5 * Z * g * g;
}

RiskPoint risk_prop1(const HIBParams& prior, int p, double beta_norm, std::size_t n_mc,
                     std::uint64_t seed)
{
    prior.validate();
    check_p(p, 2);
    if (n_mc < 2) {
        throw DomainError("n_mc must be at least 2");
    }
    Rng rng = Rng::stream(seed, {kStreamProp1});
    ZSampler draw(beta_norm, p);
    RunningStats stats;
    for (std::size_t i = 0; i < n_mc; ++i) {
        stats.add(sure_integrand(prior, p, draw(rng)));
    }
    RiskPoint pt;
    pt.beta_norm = beta_norm;
    pt.mse = p + 2.0 * stats.mean();
    pt.mc_std_err = 2.0 * std::sqrt(stats.variance() / static_cast<double>(n_mc));
    pt.estimator = Estimator::hib;
    pt.n_mc = n_mc;
    return pt;
}

RiskPoint risk_prop1_quadrature(const HIBParams& prior, int p, double beta_norm,
                                const QuadConfig& cfg)
{
    prior.validate();
    check_p(p, 2);
    check_beta_norm(beta_norm);
    const double nc = beta_norm * beta_norm;
    const QuadResult r = integrate_half_line(
        [&](double z) {
            const double w = noncentral_chi2_pdf(z, p, nc);
            return w == 0.0 ? 0.0 : w * sure_integrand(prior, p, z);
        },
        cfg);
    RiskPoint pt;
    pt.beta_norm = beta_norm;
    pt.mse = p + 2.0 * r.value;
    pt.mc_std_err = 2.0 * r.abs_error;
    pt.estimator = Estimator::hib;
    pt.n_mc = 0;
    return pt;
}

RiskPoint risk_direct(const HIBParams& prior, int p, double beta_norm, std::size_t n_mc,
                      std::uint64_t seed, DirectRule rule)
{
    prior.validate();
    check_p(p, (rule == DirectRule::js || rule == DirectRule::js_plus) ? 3 : 1);
    check_beta_norm(beta_norm);
    if (n_mc < 2) {
        throw DomainError("n_mc must be at least 2");
    }
    Rng rng = Rng::stream(seed, {kStreamDirect});
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(static_cast<std::size_t>(p));
    RunningStats stats;
    for (std::size_t i = 0; i < n_mc; ++i) {
        double Z = 0.0;
        for (int j = 0; j < p; ++j) {
            y[j] = (j == 0 ? beta_norm : 0.0) + noise(rng);
            Z += y[j] * y[j];
        }
        double factor = 1.0;  // estimate = factor * y
        switch (rule) {
        case DirectRule::posterior_mean:
            factor = 1.0 - kappa_moment(update(prior, p, Z, 1.0), 1);
            break;
        case DirectRule::mle:
            factor = 1.0;
            break;
        case DirectRule::zero:
            factor = 0.0;
            break;
        case DirectRule::js:
            factor = Z > 0.0 ? 1.0 - (p - 2.0) / Z : 0.0;
            break;
        case DirectRule::js_plus:
            factor = Z > 0.0 ? std::max(0.0, 1.0 - (p - 2.0) / Z) : 0.0;
            break;
        }
        double loss = 0.0;
        for (int j = 0; j < p; ++j) {
            const double d = factor * y[j] - (j == 0 ? beta_norm : 0.0);
            loss += d * d;
        }
        stats.add(loss);
    }
    RiskPoint pt;
    pt.beta_norm = beta_norm;
    pt.mse = stats.mean();
    pt.mc_std_err = std::sqrt(stats.variance() / static_cast<double>(n_mc));
    pt.estimator = rule == DirectRule::js        ? Estimator::js
                   : rule == DirectRule::js_plus ? Estimator::js_plus
                   : rule == DirectRule::mle     ? Estimator::mle
                                                 : Estimator::hib;
    pt.n_mc = n_mc;
    return pt;
}

double js_risk(int p, double beta_norm)
{
    check_p(p, 3);
    check_beta_norm(beta_norm);
    const double q = p - 2.0;
    double expectation = 0.0;
    poisson_sum(0.5 * beta_norm * beta_norm, 1e-16, [&](unsigned k, double w) {
        expectation += w / (q + 2.0 * k);
    });
    return p - q * q * expectation;
}

JsEstimate js_estimate(std::span<const double> y)
{
    check_p(static_cast<int>(y.size()), 3);
    double Z = 0.0;
    for (double v : y) {
        Z += v * v;
    }
    JsEstimate out;
    if (Z == 0.0) {
        out.value.assign(y.size(), 0.0);
        out.defined = false;
        return out;
    }
    const double factor = 1.0 - (static_cast<double>(y.size()) - 2.0) / Z;
    out.value.reserve(y.size());
    for (double v : y) {
        out.value.push_back(factor * v);
    }
    return out;
}

std::vector<double> js_plus_estimate(std::span<const double> y)
{
    JsEstimate js = js_estimate(y);
    if (!js.defined) {
        return js.value;
    }
    double Z = 0.0;
    for (double v : y) {
        Z += v * v;
    }
    const double factor = std::max(0.0, 1.0 - (static_cast<double>(y.size()) - 2.0) / Z);
    std::vector<double> out;
    out.reserve(y.size());
    for (double v : y) {
        out.push_back(factor * v);
    }
    return out;
}

std::vector<double> mle_estimate(std::span<const double> y)
{
    return {y.begin(), y.end()};
}

std::vector<RiskPoint> risk_curve(const RiskCurveSpec& spec)
{
    spec.prior.validate();
    check_p(spec.p, 2);
    if (spec.beta_norms.empty()) {
        throw DomainError("risk curve grid is empty");
    }
    for (std::size_t i = 0; i < spec.beta_norms.size(); ++i) {
        check_beta_norm(spec.beta_norms[i]);
        if (i > 0 && spec.beta_norms[i] < spec.beta_norms[i - 1]) {
            throw DomainError("risk curve grid must be ascending");
        }
    }
    std::vector<Estimator> estimators{Estimator::hib};
    for (Estimator e : spec.comparators) {
        if (e == Estimator::hib || std::find(estimators.begin(), estimators.end(), e) != estimators.end()) {
            continue;
        }
        if ((e == Estimator::js || e == Estimator::js_plus) && spec.p < 3) {
            throw DomainError("James-Stein comparators require p >= 3");
        }
        estimators.push_back(e);
    }

    struct Task {
        Estimator estimator;
        std::size_t grid_index;
    };
    std::vector<Task> tasks;
    for (Estimator e : estimators) {
        for (std::size_t i = 0; i < spec.beta_norms.size(); ++i) {
            tasks.push_back({e, i});
        }
    }

    std::vector<RiskPoint> out(tasks.size());
    auto run = [&](const Task& t) {
        const double bn = spec.beta_norms[t.grid_index];
        const std::uint64_t point_seed =
            Rng::derive(spec.seed, {t.grid_index, static_cast<std::uint64_t>(t.estimator)});
        RiskPoint pt;
        switch (t.estimator) {
        case Estimator::hib:
            pt = spec.quadrature ? risk_prop1_quadrature(spec.prior, spec.p, bn)
                                 : risk_prop1(spec.prior, spec.p, bn, spec.n_mc, point_seed);
            break;
        case Estimator::js:
            pt.mse = js_risk(spec.p, bn);
            break;
        case Estimator::mle:
            pt.mse = spec.p;
            break;
        case Estimator::js_plus:
            pt = risk_direct(spec.prior, spec.p, bn, spec.n_mc, point_seed, DirectRule::js_plus);
            break;
        }
        pt.beta_norm = bn;
        pt.estimator = t.estimator;
        return pt;
    };

    const unsigned workers = std::clamp<unsigned>(spec.threads, 1u, static_cast<unsigned>(tasks.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                out[i] = run(tasks[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return out;
}

}  // namespace hibshrink
