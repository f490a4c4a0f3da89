#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(HIB_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Data rows of a CSV with '#' header lines and one column-name line.
std::vector<std::vector<std::string>> csv_rows(const std::string& text, std::string* header = nullptr)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    bool seen_header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            seen_header = true;
            if (header) *header = line;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("phi1 subcommand")
{
    const auto r = run("phi1 --alpha 1 --beta 1 --gamma 2 --x 0 --y 0.75");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["value"].get<double>() == doctest::Approx(-std::log(0.25) / 0.75).epsilon(1e-12));
    CHECK(j["converged"].get<bool>());
    CHECK(j["manifest"]["subcommand"] == "phi1");

    const auto with_oracle = run("phi1 --alpha 0.5 --beta 1 --gamma 1.5 --x -3 --y 0.4 --oracle");
    REQUIRE(with_oracle.status == 0);
    const auto k = nlohmann::json::parse(with_oracle.out);
    REQUIRE(k.contains("oracle_value"));
    CHECK(k["value"].get<double>() == doctest::Approx(k["oracle_value"].get<double>()).epsilon(1e-10));
    CHECK(k["relative_difference"].get<double>() < 1e-10);

    CHECK(run("phi1 --alpha 1 --beta 1 --gamma 2 --x 0 --y 1.5").status == 2);
    CHECK(run("phi1 --alpha 1 --beta 1 --gamma 2 --x 0").status == 2);
    CHECK(run("phi1 --alpha 1 --beta 1 --gamma 2 --x 40 --y 0.3 --max-terms 5").status == 3);
}

TEST_CASE("prior-density subcommand")
{
    const auto r = run("prior-density --var lambda --prior half-cauchy --grid 0.01:5:100");
    REQUIRE(r.status == 0);
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    CHECK(header == "var,value,density");
    REQUIRE(rows.size() == 100);
    CHECK(std::stod(rows.front()[1]) == 0.01);
    CHECK(std::stod(rows.back()[1]) == 5.0);
    for (const auto& row : rows) {
        CHECK(row[0] == "lambda");
        const double l = std::stod(row[1]);
        CHECK(std::fabs(std::stod(row[2]) - 2.0 / (std::numbers::pi * (1.0 + l * l))) < 1e-10);
    }
    const auto k = run("prior-density --var kappa --prior custom:1,1,1,0 --grid 0.1:0.9:5");
    REQUIRE(k.status == 0);
    for (const auto& row : csv_rows(k.out)) CHECK(std::stod(row[2]) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(run("prior-density --var theta").status == 2);
    CHECK(run("prior-density --prior custom:1,1").status == 2);
    CHECK(run("prior-density --grid 5:1:10").status == 2);
}

TEST_CASE("shrink subcommand")
{
    {
        std::ofstream in("shrink_input.csv");
        in << "y\n";
        for (double v : {-3.0, 0.4, 2.2, 0.0, 5.5, -0.7, 1.1, 8.0, -1.9, 0.05}) in << v << "\n";
    }
    const auto r = run("shrink --input shrink_input.csv --prior half-cauchy");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto y = j["y"].get<std::vector<double>>();
    const auto m = j["post_mean"].get<std::vector<double>>();
    REQUIRE(y.size() == 10);
    REQUIRE(m.size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        if (y[i] == 0.0) {
            CHECK(m[i] == 0.0);
        } else {
            CHECK(m[i] * y[i] > 0.0);
            CHECK(std::fabs(m[i]) < std::fabs(y[i]));
        }
    }
    const double kbar = j["kappa_bar"].get<double>();
    CHECK(kbar > 0.0);
    CHECK(kbar < 1.0);

    {
        std::ofstream bad("shrink_bad.csv");
        bad << "y\n1.0\nabc\n";
    }
    CHECK(run("shrink --input shrink_bad.csv").status == 2);
    CHECK(run("shrink --input does_not_exist.csv").status == 2);
    CHECK(run("shrink --values 1,2 --sigma2 -1").status == 2);
    CHECK(run("shrink").status == 2);
}

TEST_CASE("risk-curve subcommand")
{
    const auto r = run("risk-curve --p 7 --grid 0:6:13 --mc 2000 --seed 3 --compare js");
    REQUIRE(r.status == 0);
    std::string header;
    const auto rows = csv_rows(r.out, &header);
    CHECK(header == "estimator,p,beta_norm,mse,mc_std_err,n_mc,seed");
    REQUIRE(rows.size() == 26);
    CHECK(rows[0][0] == "hib");
    CHECK(rows[13][0] == "js");
    CHECK(std::stod(rows[13][3]) == doctest::Approx(2.0).epsilon(1e-9));

    const auto m = run("risk-curve --p 7 --grid 0:6:4 --mc 500 --compare mle,js_plus");
    REQUIRE(m.status == 0);
    const auto mrows = csv_rows(m.out);
    REQUIRE(mrows.size() == 12);
    for (const auto& row : mrows) {
        if (row[0] == "mle") CHECK(std::stod(row[3]) == 7.0);
    }

    CHECK(run("risk-curve --p 2 --compare js").status == 2);
    CHECK(run("risk-curve --p 7 --compare lasso").status == 2);
    CHECK(run("risk-curve --p 7 --grid 0:6").status == 2);
}

TEST_CASE("simulate-sparse and marglik-profile")
{
    REQUIRE(run("simulate-sparse --seed 7 --out sim_a.csv").status == 0);
    REQUIRE(run("simulate-sparse --seed 7 --out sim_b.csv").status == 0);
    const std::string a = slurp("sim_a.csv");
    CHECK(a == slurp("sim_b.csv"));
    std::string header;
    const auto rows = csv_rows(a, &header);
    CHECK(header == "row,rep,value");
    CHECK(rows.size() == 150);

    const auto p = run("marglik-profile --input sim_a.csv --iter 400 --burn-in 100 --grid-points 20");
    REQUIRE(p.status == 0);
    const auto prows = csv_rows(p.out, &header);
    CHECK(header == "lambda,profile,half_cauchy_density,ig_induced_density");
    REQUIRE(prows.size() == 20);
    double top = 0.0;
    for (const auto& row : prows) top = std::max(top, std::stod(row[1]));
    CHECK(top == 1.0);

    CHECK(run("simulate-sparse").status == 2);
    {
        std::ofstream bad("sim_bad.csv");
        bad << "row,rep,value\n0,0,1.0\n0,1,2.0\n1,0,3.0\n";
    }
    CHECK(run("marglik-profile --input sim_bad.csv --iter 100 --burn-in 10").status == 2);
    CHECK(run("marglik-profile --iter 100 --burn-in 100").status == 2);
}

TEST_CASE("reruns are byte-identical")
{
    for (const std::string args :
         {"phi1 --alpha 0.5 --beta 1 --gamma 1 --x 2 --y 0.5",
          "prior-density --var psi --grid -3:3:7",
          "shrink --values 1,-2,3.5,0.2",
          "risk-curve --p 5 --grid 0:3:4 --mc 300 --seed 9 --compare js,js_plus,mle",
          "marglik-profile --iter 300 --burn-in 50 --grid-points 10 --seed 4",
          "simulate-sparse --seed 11 --pure-noise"}) {
        const auto first = run(args);
        const auto second = run(args);
        CAPTURE(args);
        CHECK(first.status == 0);
        CHECK(first.out == second.out);
        const bool has_version = first.out.find("# tool_version") != std::string::npos
                                 || first.out.find("\"tool_version\"") != std::string::npos;
        CHECK(has_version);
    }
}

TEST_CASE("thread count does not change results")
{
    const auto one = run("risk-curve --p 7 --grid 0:4:5 --mc 800 --seed 2 --threads 1");
    const auto three = run("risk-curve --p 7 --grid 0:4:5 --mc 800 --seed 2 --threads 3");
    REQUIRE(one.status == 0);
    CHECK(csv_rows(one.out) == csv_rows(three.out));
}
