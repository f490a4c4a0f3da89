// hibshrink command-line front end. Links only the C interface.

#include <hibshrink/hibshrink.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace {

constexpr int kExitUsage = 2;

// Error carrying the exit code it should map to.
struct CliError : std::runtime_error {
    CliError(int code, const std::string& what) : std::runtime_error(what), code(code) {}
    int code;
};

void check(hib_status st)
{
    if (st != HIB_OK) {
        throw CliError(static_cast<int>(st), hib_last_error());
    }
}

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) {
        throw CliError(kExitUsage, std::string("malformed ") + what + ": '" + s + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) {
        out.push_back(cur);
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

struct PriorSpec {
    double a = 0.5, b = 0.5, tau2 = 1.0, s = 0.0;
    std::string label = "half-cauchy";
};

// "half-cauchy" or "custom:a,b,tau2,s".
PriorSpec parse_prior(const std::string& text)
{
    PriorSpec p;
    if (text == "half-cauchy") {
        return p;
    }
    const std::string tag = "custom:";
    if (text.rfind(tag, 0) != 0) {
        throw CliError(kExitUsage, "unknown prior '" + text + "'");
    }
    const auto parts = split(text.substr(tag.size()), ',');
    if (parts.size() != 4) {
        throw CliError(kExitUsage, "custom prior needs a,b,tau2,s");
    }
    p.a = parse_double(parts[0], "prior a");
    p.b = parse_double(parts[1], "prior b");
    p.tau2 = parse_double(parts[2], "prior tau2");
    p.s = parse_double(parts[3], "prior s");
    p.label = "custom:" + fmt(p.a) + "," + fmt(p.b) + "," + fmt(p.tau2) + "," + fmt(p.s);
    return p;
}

struct PriorHandle {
    explicit PriorHandle(const PriorSpec& spec) { check(hib_prior_create(spec.a, spec.b, spec.tau2, spec.s, &h)); }
    ~PriorHandle() { hib_prior_destroy(h); }
    PriorHandle(const PriorHandle&) = delete;
    PriorHandle& operator=(const PriorHandle&) = delete;
    hib_prior* h = nullptr;
};

struct Grid {
    double lo = 0.0, hi = 1.0;
    std::size_t n = 2;
    std::vector<double> points() const
    {
        std::vector<double> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        }
        if (n > 1) out.back() = hi;
        return out;
    }
};

// "lo:hi:n", inclusive of both ends.
Grid parse_grid(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 3) {
        throw CliError(kExitUsage, "grid must be lo:hi:n");
    }
    Grid g;
    g.lo = parse_double(parts[0], "grid lo");
    g.hi = parse_double(parts[1], "grid hi");
    const double n = parse_double(parts[2], "grid n");
    if (!(n >= 1.0) || n != std::floor(n) || n > 1e7) {
        throw CliError(kExitUsage, "grid n must be a positive integer");
    }
    g.n = static_cast<std::size_t>(n);
    if (!(g.hi >= g.lo)) {
        throw CliError(kExitUsage, "grid hi must be >= lo");
    }
    return g;
}

unsigned thread_count(unsigned requested)
{
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HIBSHRINK_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) {
            n = std::min<unsigned>(n, static_cast<unsigned>(cap));
        }
    }
    return n;
}

struct Manifest {
    std::string subcommand;
    std::map<std::string, std::string> params;
    std::uint64_t seed = 0;

    void write_csv(std::ostream& os) const
    {
        os << "# subcommand: " << subcommand << "\n";
        os << "# tool_version: " << hib_version() << "\n";
        os << "# seed: " << seed << "\n";
        for (const auto& [k, v] : params) {
            os << "# param " << k << ": " << v << "\n";
        }
    }

    nlohmann::ordered_json json() const
    {
        nlohmann::ordered_json j;
        j["subcommand"] = subcommand;
        j["tool_version"] = hib_version();
        j["seed"] = seed;
        nlohmann::ordered_json p = nlohmann::ordered_json::object();
        for (const auto& [k, v] : params) {
            p[k] = v;
        }
        j["parameters"] = p;
        return j;
    }
};

// Output sink: a file when a path is given, stdout otherwise. Files are
// written through a temporary buffer so a failing run leaves no partial file.
class Output {
  public:
    explicit Output(std::string path) : path_(std::move(path)) {}
    std::ostream& stream() { return buf_; }
    void commit()
    {
        if (path_.empty() || path_ == "-") {
            std::cout << buf_.str();
            std::cout.flush();
            return;
        }
        std::ofstream f(path_, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw CliError(kExitUsage, "cannot open output file '" + path_ + "'");
        }
        f << buf_.str();
        if (!f) {
            throw CliError(1, "failed writing '" + path_ + "'");
        }
    }

  private:
    std::string path_;
    std::ostringstream buf_;
};

std::vector<std::string> read_data_lines(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw CliError(kExitUsage, "cannot open input file '" + path + "'");
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

bool looks_numeric(const std::string& s)
{
    double v;
    auto b = s.find_first_not_of(" \t+");
    if (b == std::string::npos) return false;
    auto [p, ec] = std::from_chars(s.data() + b, s.data() + s.size(), v);
    (void)p;
    return ec == std::errc();
}

// Single-column numeric file with an optional header line.
std::vector<double> read_column(const std::string& path)
{
    auto lines = read_data_lines(path);
    std::vector<double> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i == 0 && !looks_numeric(lines[i])) continue;
        out.push_back(parse_double(lines[i], "input value"));
    }
    return out;
}

// ---- subcommands ----

struct Phi1Opts {
    double alpha = 0.5, beta = 1.0, gamma = 1.0, x = 0.0, y = 0.0;
    double rel_tol = 1e-12;
    std::size_t max_terms = 100000;
    bool oracle = false;
    std::string out;
};

int run_phi1(const Phi1Opts& o)
{
    Manifest m{"phi1", {}, 0};
    m.params = {{"alpha", fmt(o.alpha)}, {"beta", fmt(o.beta)},       {"gamma", fmt(o.gamma)},
                {"x", fmt(o.x)},         {"y", fmt(o.y)},             {"rel_tol", fmt(o.rel_tol)},
                {"max_terms", std::to_string(o.max_terms)}, {"oracle", o.oracle ? "true" : "false"}};
    hib_series_result r{};
    const hib_status st = hib_phi1(o.alpha, o.beta, o.gamma, o.x, o.y, o.rel_tol, o.max_terms, &r);
    if (st != HIB_OK && st != HIB_ERR_CONVERGENCE) {
        check(st);
    }
    nlohmann::ordered_json j;
    j["manifest"] = m.json();
    j["value"] = r.value;
    j["log_value"] = r.log_value;
    j["sign"] = r.sign;
    j["terms_used"] = r.terms_used;
    j["converged"] = r.converged != 0;
    j["near_singular"] = r.near_singular != 0;
    if (o.oracle && st == HIB_OK) {
        hib_series_result ref{};
        check(hib_phi1_double_series(o.alpha, o.beta, o.gamma, o.x, o.y, o.rel_tol, 0, &ref));
        j["oracle_value"] = ref.value;
        j["oracle_log_value"] = ref.log_value;
        // Relative difference on the log scale stays meaningful when values overflow.
        j["relative_difference"] = std::isfinite(ref.value) && std::isfinite(r.value) && ref.value != 0.0
                                       ? std::fabs(r.value - ref.value) / std::fabs(ref.value)
                                       : std::fabs(std::expm1(r.log_value - ref.log_value));
    }
    Output out(o.out);
    out.stream() << j.dump(2) << "\n";
    out.commit();
    if (st == HIB_ERR_CONVERGENCE) {
        std::cerr << "hibshrink: " << hib_last_error() << "\n";
        return 3;
    }
    return 0;
}

struct DensityOpts {
    std::string var = "lambda";
    std::string prior = "half-cauchy";
    std::string grid = "0.01:5:100";
    std::string out;
};

int run_prior_density(const DensityOpts& o)
{
    static const std::map<std::string, hib_density_var> vars = {
        {"lambda", HIB_VAR_LAMBDA}, {"lambda2", HIB_VAR_LAMBDA2}, {"kappa", HIB_VAR_KAPPA}, {"psi", HIB_VAR_PSI}};
    const auto it = vars.find(o.var);
    if (it == vars.end()) {
        throw CliError(kExitUsage, "--var must be lambda, lambda2, kappa or psi");
    }
    const PriorSpec ps = parse_prior(o.prior);
    const Grid g = parse_grid(o.grid);
    PriorHandle prior(ps);

    Output out(o.out);
    Manifest m{"prior-density", {{"var", o.var}, {"prior", ps.label}, {"grid", o.grid}}, 0};
    m.write_csv(out.stream());
    out.stream() << "var,value,density\n";
    for (double v : g.points()) {
        double d = 0.0;
        check(hib_prior_density(prior.h, it->second, v, &d));
        out.stream() << o.var << "," << fmt(v) << "," << fmt(d) << "\n";
    }
    out.commit();
    return 0;
}

struct ShrinkOpts {
    std::string input;
    std::string values;
    std::string prior = "half-cauchy";
    double sigma2 = 1.0;
    std::string out;
};

int run_shrink(const ShrinkOpts& o)
{
    if (o.input.empty() == o.values.empty()) {
        throw CliError(kExitUsage, "give exactly one of --input or --values");
    }
    std::vector<double> y;
    if (!o.input.empty()) {
        y = read_column(o.input);
    } else {
        for (const auto& s : split(o.values, ',')) {
            y.push_back(parse_double(s, "value"));
        }
    }
    if (y.empty()) {
        throw CliError(kExitUsage, "no input values");
    }
    const PriorSpec ps = parse_prior(o.prior);
    PriorHandle prior(ps);
    hib_fit* raw = nullptr;
    check(hib_shrink(prior.h, y.data(), y.size(), o.sigma2, &raw));
    std::unique_ptr<hib_fit, decltype(&hib_fit_destroy)> fit(raw, &hib_fit_destroy);
    std::vector<double> mean(y.size());
    check(hib_fit_post_mean(fit.get(), mean.data(), mean.size()));
    double kbar = 0.0, pvar = 0.0, lml = 0.0;
    check(hib_fit_summary(fit.get(), &kbar, &pvar, &lml));

    Manifest m{"shrink", {{"prior", ps.label}, {"sigma2", fmt(o.sigma2)}, {"p", std::to_string(y.size())}}, 0};
    m.params[o.input.empty() ? "values" : "input"] = o.input.empty() ? o.values : o.input;
    nlohmann::ordered_json j;
    j["manifest"] = m.json();
    j["y"] = y;
    j["post_mean"] = mean;
    j["kappa_bar"] = kbar;
    j["post_var_scalar"] = pvar;
    j["log_marginal"] = lml;
    Output out(o.out);
    out.stream() << j.dump(2) << "\n";
    out.commit();
    return 0;
}

struct RiskOpts {
    int p = 7;
    std::string prior = "half-cauchy";
    std::string grid = "0:6:13";
    std::uint64_t mc = 200000;
    std::uint64_t seed = 0;
    std::string compare;
    bool quadrature = false;
    unsigned threads = 0;
    std::string out;
};

int run_risk_curve(const RiskOpts& o)
{
    unsigned mask = 0;
    std::vector<std::string> names;
    if (!o.compare.empty()) {
        for (const auto& c : split(o.compare, ',')) {
            if (c == "js") mask |= HIB_COMPARE_JS;
            else if (c == "js_plus") mask |= HIB_COMPARE_JS_PLUS;
            else if (c == "mle") mask |= HIB_COMPARE_MLE;
            else throw CliError(kExitUsage, "unknown comparator '" + c + "'");
        }
    }
    if (o.p < 1) {
        throw CliError(kExitUsage, "--p must be positive");
    }
    if (o.p < 3 && (mask & (HIB_COMPARE_JS | HIB_COMPARE_JS_PLUS))) {
        throw CliError(kExitUsage, "James-Stein comparators need p >= 3");
    }
    const PriorSpec ps = parse_prior(o.prior);
    const Grid g = parse_grid(o.grid);
    if (g.lo < 0.0) {
        throw CliError(kExitUsage, "beta norms must be nonnegative");
    }
    PriorHandle prior(ps);
    const auto norms = g.points();
    hib_risk_curve* raw = nullptr;
    check(hib_risk_curve_compute(prior.h, o.p, norms.data(), norms.size(), o.mc, o.seed, mask,
                                 thread_count(o.threads), o.quadrature ? 1 : 0, &raw));
    std::unique_ptr<hib_risk_curve, decltype(&hib_risk_curve_destroy)> curve(raw, &hib_risk_curve_destroy);

    std::string compare_label;
    for (const char* n : {"js", "js_plus", "mle"}) {
        const unsigned bit = std::string(n) == "js" ? HIB_COMPARE_JS
                             : std::string(n) == "js_plus" ? HIB_COMPARE_JS_PLUS : HIB_COMPARE_MLE;
        if (mask & bit) compare_label += (compare_label.empty() ? "" : ",") + std::string(n);
    }
    Manifest m{"risk-curve",
               {{"p", std::to_string(o.p)},
                {"prior", ps.label},
                {"grid", o.grid},
                {"mc", std::to_string(o.mc)},
                {"compare", compare_label},
                {"quadrature", o.quadrature ? "true" : "false"}},
               o.seed};
    Output out(o.out);
    m.write_csv(out.stream());
    out.stream() << "estimator,p,beta_norm,mse,mc_std_err,n_mc,seed\n";
    const std::size_t n = hib_risk_curve_size(curve.get());
    for (std::size_t i = 0; i < n; ++i) {
        hib_risk_point pt{};
        check(hib_risk_curve_point(curve.get(), i, &pt));
        out.stream() << hib_estimator_name(pt.estimator) << "," << o.p << "," << fmt(pt.beta_norm) << ","
                     << fmt(pt.mse) << "," << fmt(pt.mc_std_err) << "," << pt.n_mc << "," << o.seed << "\n";
    }
    out.commit();
    return 0;
}

using DatasetPtr = std::unique_ptr<hib_sparse_dataset, decltype(&hib_sparse_destroy)>;

// Reads the `row,rep,value` CSV written by simulate-sparse.
DatasetPtr read_dataset(const std::string& path)
{
    auto lines = read_data_lines(path);
    if (lines.empty() || lines.front() != "row,rep,value") {
        throw CliError(kExitUsage, "dataset must start with header row,rep,value");
    }
    struct Cell { std::size_t row, rep; double value; };
    std::vector<Cell> cells;
    std::size_t rows = 0, reps = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split(lines[i], ',');
        if (f.size() != 3) {
            throw CliError(kExitUsage, "dataset line " + std::to_string(i + 1) + " needs 3 fields");
        }
        const double r = parse_double(f[0], "row"), k = parse_double(f[1], "rep");
        if (r < 0 || k < 0 || r != std::floor(r) || k != std::floor(k) || r > 1e8 || k > 1e8) {
            throw CliError(kExitUsage, "row and rep must be nonnegative integers");
        }
        cells.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(k), parse_double(f[2], "value")});
        rows = std::max(rows, cells.back().row + 1);
        reps = std::max(reps, cells.back().rep + 1);
    }
    if (cells.size() != rows * reps) {
        throw CliError(kExitUsage, "dataset is not a complete rows x reps table");
    }
    std::vector<double> values(rows * reps, std::nan(""));
    for (const auto& c : cells) {
        double& slot = values[c.row * reps + c.rep];
        if (!std::isnan(slot)) throw CliError(kExitUsage, "duplicate dataset cell");
        slot = c.value;
    }
    hib_sparse_dataset* raw = nullptr;
    check(hib_sparse_from_values(values.data(), rows, reps, 1.0, nullptr, &raw));
    return DatasetPtr(raw, &hib_sparse_destroy);
}

struct ProfileOpts {
    std::string input;
    std::uint64_t data_seed = 7;
    bool pure_noise = false;
    std::uint64_t seed = 0;
    std::uint64_t iter = 20000;
    std::uint64_t burn_in = 5000;
    std::size_t grid_points = 200;
    std::string out;
};

int run_marglik_profile(const ProfileOpts& o)
{
    DatasetPtr data(nullptr, &hib_sparse_destroy);
    Manifest m{"marglik-profile",
               {{"iter", std::to_string(o.iter)},
                {"burn_in", std::to_string(o.burn_in)},
                {"grid_points", std::to_string(o.grid_points)}},
               o.seed};
    if (!o.input.empty()) {
        data = read_dataset(o.input);
        m.params["input"] = o.input;
    } else {
        hib_sparse_dataset* raw = nullptr;
        check(hib_sparse_simulate(o.data_seed, o.pure_noise ? 1 : 0, &raw));
        data.reset(raw);
        m.params["data_seed"] = std::to_string(o.data_seed);
        m.params["pure_noise"] = o.pure_noise ? "true" : "false";
    }
    hib_profile* raw = nullptr;
    check(hib_marglik_profile(data.get(), o.iter, o.burn_in, o.seed, o.grid_points, &raw));
    std::unique_ptr<hib_profile, decltype(&hib_profile_destroy)> prof(raw, &hib_profile_destroy);

    Output out(o.out);
    m.write_csv(out.stream());
    out.stream() << "lambda,profile,half_cauchy_density,ig_induced_density\n";
    const std::size_t n = hib_profile_size(prof.get());
    for (std::size_t i = 0; i < n; ++i) {
        double l, v, hc, ig;
        check(hib_profile_point(prof.get(), i, &l, &v, &hc, &ig));
        out.stream() << fmt(l) << "," << fmt(v) << "," << fmt(hc) << "," << fmt(ig) << "\n";
    }
    out.commit();
    return 0;
}

struct SimulateOpts {
    std::uint64_t seed = 0;
    bool pure_noise = false;
    std::string out;
};

int run_simulate_sparse(const SimulateOpts& o)
{
    hib_sparse_dataset* raw = nullptr;
    check(hib_sparse_simulate(o.seed, o.pure_noise ? 1 : 0, &raw));
    DatasetPtr data(raw, &hib_sparse_destroy);
    std::size_t rows = 0, reps = 0;
    check(hib_sparse_dims(data.get(), &rows, &reps));

    Output out(o.out);
    Manifest m{"simulate-sparse", {{"pure_noise", o.pure_noise ? "true" : "false"}}, o.seed};
    m.write_csv(out.stream());
    out.stream() << "row,rep,value\n";
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < reps; ++j) {
            double v = 0.0;
            check(hib_sparse_value(data.get(), i, j, &v));
            out.stream() << i << "," << j << "," << fmt(v) << "\n";
        }
    }
    out.commit();
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hypergeometric inverted-beta shrinkage priors"};
    app.set_version_flag("--version", std::string(hib_version()));
    app.require_subcommand(1);

    Phi1Opts phi1;
    auto* c_phi1 = app.add_subcommand("phi1", "Evaluate Humbert's Phi1(alpha, beta; gamma; x, y)");
    c_phi1->add_option("--alpha", phi1.alpha)->required();
    c_phi1->add_option("--beta", phi1.beta)->required();
    c_phi1->add_option("--gamma", phi1.gamma)->required();
    c_phi1->add_option("--x", phi1.x)->required();
    c_phi1->add_option("--y", phi1.y)->required();
    c_phi1->add_option("--rel-tol", phi1.rel_tol, "Relative stopping tolerance")->capture_default_str();
    c_phi1->add_option("--max-terms", phi1.max_terms, "Term budget")->capture_default_str();
    c_phi1->add_flag("--oracle", phi1.oracle, "Also evaluate the raw double series");
    c_phi1->add_option("--out", phi1.out, "Output file (default stdout)");

    DensityOpts dens;
    auto* c_dens = app.add_subcommand("prior-density", "Tabulate the prior density on a grid");
    c_dens->add_option("--var", dens.var, "lambda | lambda2 | kappa | psi")->capture_default_str();
    c_dens->add_option("--prior", dens.prior, "half-cauchy | custom:a,b,tau2,s")->capture_default_str();
    c_dens->add_option("--grid", dens.grid, "lo:hi:n")->capture_default_str();
    c_dens->add_option("--out", dens.out, "Output file (default stdout)");

    ShrinkOpts shr;
    auto* c_shr = app.add_subcommand("shrink", "Posterior mean of a normal mean vector");
    c_shr->add_option("--input", shr.input, "Single-column numeric file");
    c_shr->add_option("--values", shr.values, "Comma-separated observations");
    c_shr->add_option("--prior", shr.prior, "half-cauchy | custom:a,b,tau2,s")->capture_default_str();
    c_shr->add_option("--sigma2", shr.sigma2, "Known noise variance")->capture_default_str();
    c_shr->add_option("--out", shr.out, "Output file (default stdout)");

    RiskOpts risk;
    auto* c_risk = app.add_subcommand("risk-curve", "Mean-squared error as a function of |beta|");
    c_risk->add_option("--p", risk.p, "Dimension")->capture_default_str();
    c_risk->add_option("--prior", risk.prior, "half-cauchy | custom:a,b,tau2,s")->capture_default_str();
    c_risk->add_option("--grid", risk.grid, "lo:hi:n grid of |beta|")->capture_default_str();
    c_risk->add_option("--mc", risk.mc, "Monte Carlo draws per point")->capture_default_str();
    c_risk->add_option("--seed", risk.seed)->capture_default_str();
    c_risk->add_option("--compare", risk.compare, "Comma list of js, js_plus, mle");
    c_risk->add_flag("--quadrature", risk.quadrature, "Integrate over Z instead of sampling");
    c_risk->add_option("--threads", risk.threads, "Worker threads (0 = all cores)");
    c_risk->add_option("--out", risk.out, "Output file (default stdout)");

    ProfileOpts prof;
    auto* c_prof = app.add_subcommand("marglik-profile", "Marginal-likelihood profile of lambda");
    c_prof->add_option("--input", prof.input, "Dataset CSV from simulate-sparse");
    c_prof->add_option("--data-seed", prof.data_seed, "Seed for the canonical dataset when no --input")
        ->capture_default_str();
    c_prof->add_flag("--pure-noise", prof.pure_noise, "Simulate the dataset with beta = 0 noise");
    c_prof->add_option("--seed", prof.seed, "Sampler seed")->capture_default_str();
    c_prof->add_option("--iter", prof.iter)->capture_default_str();
    c_prof->add_option("--burn-in", prof.burn_in)->capture_default_str();
    c_prof->add_option("--grid-points", prof.grid_points)->capture_default_str();
    c_prof->add_option("--out", prof.out, "Output file (default stdout)");

    SimulateOpts sim;
    auto* c_sim = app.add_subcommand("simulate-sparse", "Simulate the 5-signal, 45-null dataset");
    c_sim->add_option("--seed", sim.seed)->required();
    c_sim->add_flag("--pure-noise", sim.pure_noise, "Draw every observation as N(0, 1)");
    c_sim->add_option("--out", sim.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*c_phi1) return run_phi1(phi1);
        if (*c_dens) return run_prior_density(dens);
        if (*c_shr) return run_shrink(shr);
        if (*c_risk) return run_risk_curve(risk);
        if (*c_prof) return run_marglik_profile(prof);
        if (*c_sim) return run_simulate_sparse(sim);
    } catch (const CliError& e) {
        std::cerr << "hibshrink: " << e.what() << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "hibshrink: " << e.what() << "\n";
        return 1;
    }
    return kExitUsage;
}
