#include "hawkespop/csv.hpp"
#include "hawkespop_cli/commands.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

using namespace hawkespop;

namespace {

const std::string kConfigs = HAWKESPOP_CONFIG_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "hawkespop");
    std::ostringstream out, err;
    const int code = cli::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, double> index_values(const std::string &csv) {
    std::map<std::string, double> m;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        const auto c = line.find(',');
        m[line.substr(0, c)] = std::stod(line.substr(c + 1));
    }
    return m;
}

std::filesystem::path scratch(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("hawkespop_test_" + name);
}

} // namespace

TEST_CASE("number formatting is locale free and round-trips") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(-2.25) == "-2.25");
    CHECK(format_number(123456.5) == "123456.5");
    CHECK(format_number(1e-3) == "0.001");
    CHECK(format_number(1e6) == "1e+06");
    CHECK(format_number(2.5e-4) == "2.5e-04");
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double x : {0.1, 1.0 / 3.0, 2.0 / 3.0 * 1e-7, 6.02214076e23, 9.999e5})
        CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("CSV writer quotes fields and checks widths") {
    std::ostringstream os;
    CsvWriter w(os);
    w.header({"a", "b"});
    w.row({"x,y", "say \"hi\""});
    CHECK(os.str() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n");
    CHECK_THROWS((void)w.row({"only one"}));
}

TEST_CASE("command line: help, usage errors, bad configs") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"simulate", "--help"}).code == 0);
    CHECK(run({"compare", "--help"}).code == 0);
    CHECK(run({}).code != 0);
    CHECK(run({"frobnicate"}).code != 0);
    const Run r0 = run({"simulate", kConfigs + "/bivariate.json", "--runs", "0"});
    CHECK(r0.code != 0);
    CHECK(r0.out.empty());
    CHECK(run({"moments", kConfigs + "/missing.json"}).code != 0);

    const auto bad = scratch("bad.json");
    std::ofstream(bad) << "{\"d\": 2, \"lambda_bar\": [1\n";
    const Run rb = run({"moments", bad.string()});
    CHECK(rb.code == 1);
    CHECK(rb.err.find("line 2") != std::string::npos);

    const auto typo = scratch("typo.json");
    {
        std::ifstream in(kConfigs + "/bivariate.json");
        std::stringstream ss;
        ss << in.rdbuf();
        std::string text = ss.str();
        text.replace(text.find("\"alpha\""), 7, "\"alpah\"");
        std::ofstream(typo) << text;
    }
    const Run rt = run({"moments", typo.string()});
    CHECK(rt.code == 1);
    CHECK(rt.err.find("alpah") != std::string::npos);

    const Run rn = run({"nearly-unstable", kConfigs + "/bivariate.json"});
    CHECK(rn.code == 1);
    CHECK(rn.err.find("symmetric") != std::string::npos);
    std::filesystem::remove(bad);
    std::filesystem::remove(typo);
}

TEST_CASE("moments command") {
    const Run st = run({"moments", kConfigs + "/bivariate.json", "--order", "1",
                        "--stationary"});
    REQUIRE(st.code == 0);
    CHECK(st.out.rfind("index,value\n", 0) == 0);
    const auto v = index_values(st.out);
    CHECK(v.at("L1^1") == doctest::Approx(13.0 / 6.0).epsilon(1e-14));
    CHECK(v.at("Q2^[1]") == doctest::Approx(1.75).epsilon(1e-14));

    const auto a = index_values(run({"moments", kConfigs + "/bivariate.json",
                                     "--method", "blocks"}).out);
    const auto b = index_values(run({"moments", kConfigs + "/bivariate.json",
                                     "--method", "ode"}).out);
    const auto c = index_values(run({"moments", kConfigs + "/bivariate.json",
                                     "--method", "closed"}).out);
    REQUIRE(a.size() == 34);
    for (const auto &[k, x] : a) {
        CHECK(std::abs(x - b.at(k)) < 1e-6);
        CHECK(std::abs(x - c.at(k)) < 1e-6);
    }
    CHECK(run({"moments", kConfigs + "/trivariate.json", "--method", "blocks"}).code != 0);
}

TEST_CASE("commands are deterministic and honour --output") {
    const std::vector<std::string> sim = {"simulate", kConfigs + "/bivariate.json",
                                          "--runs", "300", "--seed", "17"};
    const Run a = run(sim);
    const Run b = run(sim);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("index,estimate,std_error,runs\n", 0) == 0);

    const auto file = scratch("out.csv");
    std::vector<std::string> with_out = {"-o", file.string()};
    with_out.insert(with_out.end(), sim.begin(), sim.end());
    const Run c = run(with_out);
    CHECK(c.code == 0);
    CHECK(c.out.empty());
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str() == a.out);
    std::filesystem::remove(file);

    const auto dir = scratch("events");
    std::filesystem::remove_all(dir);
    const Run d = run({"simulate", kConfigs + "/bivariate.json", "--runs", "5",
                       "--seed", "3", "--dump-events", dir.string(),
                       "--dump-limit", "2"});
    CHECK(d.code == 0);
    CHECK(std::filesystem::exists(dir / "run_0.csv"));
    CHECK(std::filesystem::exists(dir / "run_1.csv"));
    CHECK_FALSE(std::filesystem::exists(dir / "run_2.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("transform and nearly-unstable commands") {
    const Run t = run({"transform", kConfigs + "/poisson.json", "--t", "2",
                       "--s", "0.5,0", "--z", "0.5,1"});
    REQUIRE(t.code == 0);
    const auto v = index_values(t.out);
    const double mean = 0.5 * (1 - std::exp(-2.0));
    CHECK(v.at("zeta") == doctest::Approx(std::exp(-0.25) * std::exp(-0.5 * mean)).epsilon(1e-8));

    const Run n = run({"nearly-unstable", kConfigs + "/symmetric.json", "--summary"});
    REQUIRE(n.code == 0);
    std::istringstream in(n.out);
    std::string line;
    std::getline(in, line);
    CHECK(line.rfind("theta,sigma,limit_sigma,sup_distance", 0) == 0);
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    CHECK(rows == 3);
}
