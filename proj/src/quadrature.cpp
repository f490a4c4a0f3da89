#include "hibshrink/quadrature.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "hibshrink/errors.hpp"

namespace hibshrink {

namespace {

// Kronrod 15-point nodes on [-1, 1] (non-negative half) and weights; the odd
// entries carry the embedded 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo, hi;
    double value, error;
    int depth;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class G>
Panel gauss_kronrod(const G& g, double lo, double hi, int depth, std::size_t& evals)
{
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = g(center);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double f1 = g(center - dx);
        const double f2 = g(center + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) {
            gauss += kWg[j / 2] * (f1 + f2);
        }
    }
    evals += 15;
    return {lo, hi, kronrod * half, std::fabs((kronrod - gauss) * half), depth};
}

struct AdaptiveSum {
    double value = 0.0;
    double error = 0.0;
    std::size_t evals = 0;
};

// Global adaptive bisection over a set of starting panels sharing one
// tolerance budget.
template <class G>
AdaptiveSum adapt(const std::vector<std::pair<G, std::pair<double, double>>>& pieces,
                  const QuadConfig& cfg)
{
    struct Tagged {
        Panel panel;
        std::size_t piece;
        bool operator<(const Tagged& o) const { return panel < o.panel; }
    };
    std::priority_queue<Tagged> queue;
    AdaptiveSum out;
    double total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const auto& [g, range] = pieces[i];
        if (range.second <= range.first) {
            continue;
        }
        Panel p = gauss_kronrod(g, range.first, range.second, 0, out.evals);
        total += p.value;
        total_err += p.error;
        queue.push({p, i});
    }
    while (!queue.empty()) {
        const double target = std::max(cfg.abs_tol, cfg.rel_tol * std::fabs(total));
        if (total_err <= target) {
            break;
        }
        Tagged worst = queue.top();
        if (worst.panel.depth >= cfg.max_depth || !std::isfinite(total)) {
            throw AccuracyError("adaptive quadrature exceeded max_depth", total, total_err);
        }
        queue.pop();
        const auto& g = pieces[worst.piece].first;
        const double mid = 0.5 * (worst.panel.lo + worst.panel.hi);
        Panel left = gauss_kronrod(g, worst.panel.lo, mid, worst.panel.depth + 1, out.evals);
        Panel right = gauss_kronrod(g, mid, worst.panel.hi, worst.panel.depth + 1, out.evals);
        total += left.value + right.value - worst.panel.value;
        total_err += left.error + right.error - worst.panel.error;
        queue.push({left, worst.piece});
        queue.push({right, worst.piece});
    }
    // Recompute from panels to shed accumulated rounding in the running sums.
    out.value = 0.0;
    out.error = 0.0;
    while (!queue.empty()) {
        out.value += queue.top().panel.value;
        out.error += queue.top().panel.error;
        queue.pop();
    }
    return out;
}

void check_config(const QuadConfig& cfg)
{
    if (!(cfg.abs_tol > 0.0 && cfg.abs_tol < 1.0) || !(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0)) {
        throw DomainError("quadrature tolerances must lie in (0, 1)");
    }
    if (cfg.max_depth < 1) {
        throw DomainError("quadrature max_depth must be at least 1");
    }
}

}  // namespace

QuadResult integrate_unit(const UnitIntegrand& f, double a_exp, double b_exp, const QuadConfig& cfg)
{
    check_config(cfg);
    using Fn = std::function<double(double)>;
    std::vector<std::pair<Fn, std::pair<double, double>>> pieces;

    // Left half, kappa in (0, 1/2].
    if (a_exp > 0.0 && a_exp < 1.0) {
        const double inv = 1.0 / a_exp;
        pieces.push_back({[&f, inv, a_exp](double u) {
                              if (u <= 0.0) {
                                  return 0.0;
                              }
                              const double k = std::pow(u, inv);
                              return f(k, 1.0 - k) * k / (a_exp * u);
                          },
                          {0.0, std::pow(0.5, a_exp)}});
    } else {
        pieces.push_back({[&f](double k) { return f(k, 1.0 - k); }, {0.0, 0.5}});
    }
    // Right half in terms of the complement c = 1 - kappa in (0, 1/2].
    if (b_exp > 0.0 && b_exp < 1.0) {
        const double inv = 1.0 / b_exp;
        pieces.push_back({[&f, inv, b_exp](double v) {
                              if (v <= 0.0) {
                                  return 0.0;
                              }
                              const double c = std::pow(v, inv);
                              return f(1.0 - c, c) * c / (b_exp * v);
                          },
                          {0.0, std::pow(0.5, b_exp)}});
    } else {
        pieces.push_back({[&f](double c) { return f(1.0 - c, c); }, {0.0, 0.5}});
    }
    const AdaptiveSum s = adapt(pieces, cfg);
    return {s.value, s.error, s.evals};
}

QuadResult integrate_unit(const std::function<double(double)>& f, double a_exp, double b_exp,
                          const QuadConfig& cfg)
{
    return integrate_unit(UnitIntegrand([&f](double k, double) { return f(k); }), a_exp, b_exp, cfg);
}

QuadResult integrate_half_line(const std::function<double(double)>& f, const QuadConfig& cfg)
{
    // x = t/(1-t), dx = dt/(1-t)^2; with c = 1 - t, x = (1-c)/c.
    return integrate_unit(UnitIntegrand([&f](double t, double c) {
                              if (c <= 0.0) {
                                  return 0.0;
                              }
                              return f(t / c) / (c * c);
                          }),
                          1.0, 1.0, cfg);
}

double log_peak_unit(const std::function<double(double, double)>& log_f)
{
    double best = -std::numeric_limits<double>::infinity();
    auto visit = [&](double k, double c) {
        const double v = log_f(k, c);
        if (v > best) {
            best = v;
        }
    };
    constexpr int kUniform = 64;
    for (int i = 0; i < kUniform; ++i) {
        const double k = (i + 0.5) / kUniform;
        visit(k, 1.0 - k);
    }
    for (int j = 7; j <= 60; ++j) {
        const double e = std::ldexp(1.0, -j);
        visit(e, 1.0 - e);
        visit(1.0 - e, e);
    }
    return std::isfinite(best) ? best : 0.0;
}

double oracle_hib_moment(const HIBParams& prior, unsigned n, unsigned p, double Z,
                         const QuadConfig& cfg)
{
    prior.validate();
    const double a = prior.a + 0.5 * p;
    const double b = prior.b;
    const double inv_t2 = 1.0 / prior.tau2;
    const double tilt = prior.s + 0.5 * Z;
    auto log_kernel = [=](double k, double c) {
        return (a - 1.0) * std::log(k) + (b - 1.0) * std::log(c)
               - std::log(inv_t2 + (1.0 - inv_t2) * k) - tilt * k;
    };
    // Endpoint singularities integrate to O(1); only the smooth part sets the scale.
    const double shift = log_peak_unit([=](double k, double c) {
        return std::max(a - 1.0, 0.0) * std::log(k) + std::max(b - 1.0, 0.0) * std::log(c)
               - std::log(inv_t2 + (1.0 - inv_t2) * k) - tilt * k;
    });
    auto kernel = [&](double k, double c, unsigned power) {
        if (k <= 0.0 || c <= 0.0) {
            return 0.0;
        }
        return std::exp(power * std::log(k) + log_kernel(k, c) - shift);
    };
    if (n == 0) {
        return 1.0;
    }
    const QuadResult den = integrate_unit(
        UnitIntegrand([&](double k, double c) { return kernel(k, c, 0); }), a, b, cfg);
    const QuadResult num = integrate_unit(
        UnitIntegrand([&](double k, double c) { return kernel(k, c, n); }), a + n, b, cfg);
    return num.value / den.value;
}

}  // namespace hibshrink
