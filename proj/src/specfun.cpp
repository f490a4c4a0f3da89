#include "hibshrink/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "hibshrink/errors.hpp"

namespace hibshrink {

namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoeff = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Rescale threshold for the outer Phi1 sum. Terms are strictly decreasing
// past the peak, so only upward rescaling is needed.
constexpr double kRescaleAt = 1e250;
constexpr double kRescaleBy = 1e-250;
// |x| from which phi1 tries the large-argument expansion first.
constexpr double kAsymptoticX = 300.0;
constexpr std::size_t kAsymptoticTerms = 400;
const double kLogRescale = 250.0 * std::numbers::ln10;

class Accumulator {
  public:
    explicit Accumulator(bool kahan) : kahan_(kahan) {}

    void add(double term)
    {
        if (!kahan_) {
            sum_ += term;
            return;
        }
        const double y = term - comp_;
        const double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }

    void scale(double factor)
    {
        sum_ *= factor;
        comp_ *= factor;
    }

    double sum() const { return sum_; }

  private:
    bool kahan_;
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Stopping rule shared by all series: the current term is negligible relative
// to the partial sum and no larger than its predecessor, three times running.
class TermRatioRule {
  public:
    // `limit_ratio` is a lower bound for the asymptotic term ratio, used in
    // the tail estimate when the observed ratio is still climbing towards it.
    explicit TermRatioRule(double rel_tol, double first_magnitude, double limit_ratio = 0.0)
        : rel_tol_(rel_tol), prev_(first_magnitude), limit_(limit_ratio) {}

    bool done(double term_magnitude, double partial_sum)
    {
        // Geometric tail bound from the latest term ratio.
        const double ratio = std::max(prev_ > 0.0 ? term_magnitude / prev_ : 0.0, limit_);
        const double tail = ratio < 1.0 ? term_magnitude * ratio / (1.0 - ratio)
                                        : std::numeric_limits<double>::infinity();
        const double bound = rel_tol_ * std::fabs(partial_sum);
        const bool small = term_magnitude <= bound && tail <= 0.1 * bound;
        run_ = small ? run_ + 1 : 0;
        prev_ = term_magnitude;
        return run_ >= 3;
    }

    void rescale(double factor) { prev_ *= factor; }

  private:
    double rel_tol_;
    double prev_;
    double limit_;
    int run_ = 0;
};

void check_control(const SeriesControl& ctl)
{
    if (!(ctl.rel_tol > 0.0 && ctl.rel_tol < 1.0)) {
        throw DomainError("series rel_tol must lie in (0, 1)");
    }
    if (ctl.max_terms < 1) {
        throw DomainError("series max_terms must be at least 1");
    }
}

void finish(SeriesResult& r, double sum, double log_offset)
{
    r.sign = sum < 0.0 ? -1 : 1;
    r.log_value = std::log(std::fabs(sum)) + log_offset;
    r.value = r.sign * std::exp(r.log_value);
    r.converged = true;
}

// 2F1 power series for 0 <= y < 1.
SeriesResult sum_2f1(double a, double b, double c, double y, const SeriesControl& ctl)
{
    SeriesResult r;
    r.near_singular = y >= kNearSingularY;
    if (y == 0.0) {
        r.value = 1.0;
        r.terms_used = 1;
        r.converged = true;
        return r;
    }
    Accumulator acc(ctl.kahan);
    acc.add(1.0);
    TermRatioRule rule(ctl.rel_tol, 1.0, y);
    double term = 1.0;
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        const double dk = static_cast<double>(k);
        term *= (a + dk) * (b + dk) / ((c + dk) * (dk + 1.0)) * y;
        acc.add(term);
        if (rule.done(std::fabs(term), acc.sum())) {
            r.terms_used = k + 2;
            finish(r, acc.sum(), 0.0);
            return r;
        }
    }
    throw ConvergenceError("2F1 series did not converge", acc.sum(), ctl.max_terms + 1);
}

// Phi1 for 0 <= y < 1 via the 2F1-series representations. alpha may be any
// real here (the y < 0 transformation can make it negative).
SeriesResult phi1_nonneg_y(double alpha, double beta, double gamma, double x, double y,
                           const SeriesControl& ctl)
{
    const bool negative_x = x < 0.0;
    const double ax = std::fabs(x);
    const double top = negative_x ? gamma - alpha : alpha;

    SeriesResult r;
    r.near_singular = y >= kNearSingularY;
    auto inner = [&](std::size_t n) -> double {
        if (y == 0.0) {
            return 1.0;
        }
        const double dn = static_cast<double>(n);
        const SeriesResult f = negative_x ? sum_2f1(beta, alpha, gamma + dn, y, ctl)
                                          : sum_2f1(beta, alpha + dn, gamma + dn, y, ctl);
        return f.value;
    };

    Accumulator acc(ctl.kahan);
    const double first = inner(0);
    acc.add(first);
    TermRatioRule rule(ctl.rel_tol, std::fabs(first));
    double coeff = 1.0;
    double log_scale = negative_x ? x : 0.0;
    for (std::size_t n = 0; n < ctl.max_terms; ++n) {
        const double dn = static_cast<double>(n);
        coeff *= (top + dn) / (gamma + dn) * ax / (dn + 1.0);
        const double term = coeff == 0.0 ? 0.0 : coeff * inner(n + 1);
        acc.add(term);
        if (std::fabs(acc.sum()) > kRescaleAt) {
            coeff *= kRescaleBy;
            acc.scale(kRescaleBy);
            rule.rescale(kRescaleBy);
            log_scale += kLogRescale;
        }
        if (rule.done(std::fabs(term), acc.sum())) {
            r.terms_used = n + 2;
            finish(r, acc.sum(), log_scale);
            return r;
        }
    }
    throw ConvergenceError("Phi1 outer series did not converge", acc.sum(), ctl.max_terms + 1);
}

// Watson's lemma for x -> +inf. With t = 1 - u in the integral representation,
//   Phi1 = Gamma(g)/(Gamma(a) Gamma(g-a)) e^x (1-y)^-b
//          \int u^(g-a-1) (1-u)^(a-1) (1 + r u)^-b e^(-x u) du,   r = y/(1-y),
// and expanding the smooth factor in powers of u gives
//   Phi1 ~ Gamma(g)/Gamma(a) e^x x^(a-g) (1-y)^-b sum_k c_k (g-a)_k x^-k.
// Returns nullopt when the terms stop decreasing before reaching tolerance.
std::optional<SeriesResult> phi1_asymptotic(double alpha, double beta, double gamma, double x,
                                            double y, const SeriesControl& ctl)
{
    const double c = gamma - alpha;
    if (!(c > 0.0) || !(alpha > 0.0) || !(x > 0.0)) {
        return std::nullopt;
    }
    const double r = y / (1.0 - y);
    const std::size_t limit = std::min<std::size_t>(ctl.max_terms, kAsymptoticTerms);
    std::vector<double> left{1.0};   // (1-u)^(alpha-1)
    std::vector<double> right{1.0};  // (1+ru)^-beta
    Accumulator acc(ctl.kahan);
    acc.add(1.0);
    double scale = 1.0;  // (c)_k / x^k
    int run = 0;
    for (std::size_t k = 1; k < limit; ++k) {
        const double dk = static_cast<double>(k);
        left.push_back(left.back() * (dk - alpha) / dk);
        right.push_back(right.back() * (beta + dk - 1.0) / dk * -r);
        double coeff = 0.0;
        for (std::size_t j = 0; j <= k; ++j) {
            coeff += left[j] * right[k - j];
        }
        scale *= (c + dk - 1.0) / x;
        const double term = coeff * scale;
        acc.add(term);
        run = std::fabs(term) <= 0.1 * ctl.rel_tol * std::fabs(acc.sum()) ? run + 1 : 0;
        if (run >= 3) {
            SeriesResult out;
            out.terms_used = k + 1;
            out.near_singular = y >= kNearSingularY;
            const double log_pre = log_gamma(gamma) - log_gamma(alpha) + x - c * std::log(x)
                                   - beta * std::log1p(-y);
            finish(out, acc.sum(), log_pre);
            return out;
        }
    }
    return std::nullopt;
}

void check_phi1_args(const Phi1Args& a)
{
    if (!(a.alpha > 0.0 && a.beta > 0.0 && a.gamma > 0.0)) {
        throw DomainError("Phi1 requires alpha, beta, gamma > 0");
    }
    if (!std::isfinite(a.x) || std::isnan(a.y)) {
        throw DomainError("Phi1 arguments must be finite");
    }
    if (!(a.y < 1.0)) {
        throw DomainError("Phi1 requires y < 1, got y = " + std::to_string(a.y));
    }
    check_control(a.control);
}

}  // namespace

double pochhammer(double c, unsigned n)
{
    double out = 1.0;
    for (unsigned k = 0; k < n; ++k) {
        out *= c + k;
    }
    return out;
}

double log_gamma(double x)
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("log_gamma requires a finite positive argument");
    }
    if (x < 0.5) {
        // Reflection; sin(pi x) > 0 on (0, 1/2).
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double series = kLanczosCoeff[0];
    for (std::size_t i = 1; i < kLanczosCoeff.size(); ++i) {
        series += kLanczosCoeff[i] / (z + static_cast<double>(i));
    }
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double log_beta(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("log_beta requires positive arguments");
    }
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

SeriesResult gauss_2f1(double a, double b, double c, double y, const SeriesControl& ctl)
{
    check_control(ctl);
    if (!(c > 0.0)) {
        throw DomainError("2F1 requires c > 0");
    }
    if (!(y < 1.0)) {
        throw DomainError("2F1 series requires y < 1");
    }
    if (y >= 0.0) {
        return sum_2f1(a, b, c, y, ctl);
    }
    // Pfaff: 2F1(a,b;c;y) = (1-y)^-a 2F1(a, c-b; c; y/(y-1)).
    SeriesResult r = sum_2f1(a, c - b, c, y / (y - 1.0), ctl);
    const double log_pre = -a * std::log1p(-y);
    r.log_value += log_pre;
    r.value = r.sign * std::exp(r.log_value);
    return r;
}

SeriesResult phi1(const Phi1Args& args)
{
    check_phi1_args(args);
    const bool large = std::fabs(args.x) >= kAsymptoticX;
    if (args.method == Phi1Method::asymptotic || (args.method == Phi1Method::automatic && large)) {
        std::optional<SeriesResult> r;
        if (args.x > 0.0) {
            r = phi1_asymptotic(args.alpha, args.beta, args.gamma, args.x, args.y, args.control);
        } else {
            r = phi1_asymptotic(args.gamma - args.alpha, args.beta, args.gamma, -args.x,
                                args.y / (args.y - 1.0), args.control);
            if (r) {
                r->log_value += args.x - args.beta * std::log1p(-args.y);
                r->value = r->sign * std::exp(r->log_value);
                r->near_singular = args.y >= kNearSingularY;
            }
        }
        if (r) {
            return *r;
        }
        if (args.method == Phi1Method::asymptotic) {
            throw ConvergenceError("Phi1 asymptotic expansion did not reach tolerance", 0.0,
                                   kAsymptoticTerms);
        }
    }
    if (args.y >= 0.0) {
        return phi1_nonneg_y(args.alpha, args.beta, args.gamma, args.x, args.y, args.control);
    }
    const double y_t = args.y / (args.y - 1.0);
    SeriesResult r = phi1_nonneg_y(args.gamma - args.alpha, args.beta, args.gamma, -args.x, y_t,
                                   args.control);
    r.log_value += args.x - args.beta * std::log1p(-args.y);
    r.value = r.sign * std::exp(r.log_value);
    return r;
}

SeriesResult phi1_double_series(const Phi1Args& args)
{
    check_phi1_args(args);
    using ld = long double;
    ld alpha = args.alpha;
    const ld beta = args.beta;
    const ld gamma = args.gamma;
    ld x = args.x;
    ld y = args.y;
    ld log_pre = 0.0L;
    if (args.y < 0.0) {
        log_pre = x - beta * std::log1p(-y);
        alpha = gamma - alpha;
        x = -x;
        y = y / (y - 1.0L);
    }

    ld abs_sum = 0.0L;
    auto rectangle = [&](std::size_t rows, std::size_t cols) {
        ld total = 0.0L;
        ld lead = 1.0L;
        abs_sum = 0.0L;
        for (std::size_t m = 0; m < rows; ++m) {
            const ld dm = static_cast<ld>(m);
            if (m > 0) {
                lead *= (alpha + dm - 1.0L) / (gamma + dm - 1.0L) * x / dm;
            }
            ld term = lead;
            ld row = term;
            ld row_abs = std::fabs(term);
            for (std::size_t n = 1; n < cols; ++n) {
                const ld dn = static_cast<ld>(n);
                term *= (alpha + dm + dn - 1.0L) * (beta + dn - 1.0L)
                        / ((gamma + dm + dn - 1.0L) * dn) * y;
                row += term;
                row_abs += std::fabs(term);
            }
            total += row;
            abs_sum += row_abs;
        }
        return total;
    };

    const ld eps = std::numeric_limits<ld>::epsilon();
    std::size_t rows = 16 + 2 * static_cast<std::size_t>(std::ceil(std::fabs(args.x)));
    std::size_t cols = 16;
    ld prev = rectangle(rows, cols);
    SeriesResult r;
    r.near_singular = static_cast<double>(y) >= kNearSingularY;
    while (2 * rows <= args.control.max_terms && 2 * cols <= args.control.max_terms) {
        rows *= 2;
        cols *= 2;
        const ld cur = rectangle(rows, cols);
        const ld floor = 256.0L * eps * abs_sum;
        if (std::fabs(cur - prev) <= args.control.rel_tol * std::fabs(cur) + floor) {
            r.terms_used = rows * cols;
            r.sign = cur < 0 ? -1 : 1;
            r.log_value = static_cast<double>(std::log(std::fabs(cur)) + log_pre);
            r.value = r.sign * std::exp(r.log_value);
            r.converged = true;
            return r;
        }
        prev = cur;
    }
    throw ConvergenceError("Phi1 double series did not converge",
                           static_cast<double>(prev * std::exp(log_pre)), rows * cols);
}

}  // namespace hibshrink
