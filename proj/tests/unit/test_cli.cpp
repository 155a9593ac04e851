#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "latdim/io.hpp"

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = latdim::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path = fs::temp_directory_path() / ("latdim_cli_test_" + std::to_string(::getpid()));
    TempDir() { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        out.push_back(l);
    return out;
}

std::string slurp(const std::string& p)
{
    std::ifstream f(p);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("cli: unknown subcommand and help")
{
    auto r = cli({"frobnicate"});
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
    r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("gen") != std::string::npos);
    CHECK(cli({}).code == 2);
    CHECK(cli({"gen", "cantor", "--base", "3"}).code == 2);
}

TEST_CASE("cli: gen cantor and dim counting")
{
    TempDir dir;
    auto r = cli({"gen", "cantor", "--base", "3", "--digits", "0,1", "--depth", "12", "-o", dir / "e.jsonl"});
    REQUIRE(r.code == 0);
    const auto set = latdim::io::read_set(fs::path(dir / "e.jsonl"));
    CHECK(set.size() == 4096);

    r = cli({"dim", "counting", dir / "e.jsonl", "--scales", "pow2:1..11", "--alpha", "0.5"});
    REQUIRE(r.code == 0);
    const auto ls = lines(r.out);
    REQUIRE(ls.size() == 13);
    CHECK(ls[0] == "side,count,exponent");
    CHECK(ls[1].rfind("2,", 0) == 0);
    const auto summary = json::parse(ls.back());
    CHECK(summary["scales"] == 11);
    CHECK(summary["slope"].get<double>() > 0.5);
    CHECK(summary["sup_values"].contains("0.5"));

    r = cli({"dim", "mass", dir / "e.jsonl", "--window", "4", "-o", dir / "m.csv"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out).size() == 1);
    CHECK(lines(slurp(dir / "m.csv")).size() == 1 + json::parse(r.out)["scales"].get<std::size_t>());
}

TEST_CASE("cli: every generator family")
{
    TempDir dir;
    const std::vector<std::vector<std::string>> cmds{
        {"gen", "polynomial", "--coeffs", "0,0,1", "--to", "100"},
        {"gen", "power", "--beta", "3/2", "--to", "100"},
        {"gen", "geometric", "--ratio", "3/2", "--limit", "1000"},
        {"gen", "primes", "--limit", "100"},
        {"gen", "interval", "--from", "-5", "--to", "5"},
        {"gen", "cantor", "--base", "2", "--matrix", "1,1;1,0", "--depth", "5"},
        {"gen", "ip", "--preset", "pow2", "--depth", "3"},
        {"gen", "ip", "--k", "2,2", "--d", "1,3", "--depth", "2"},
    };
    for (const auto& c : cmds) {
        const auto r = cli(c);
        CHECK_MESSAGE(r.code == 0, c[1] << ": " << r.err);
        const auto header = json::parse(lines(r.out).front());
        CHECK(header["dim"] == 1);
        CHECK(header.contains("spec"));
    }
    CHECK(lines(cli({"gen", "primes", "--limit", "100"}).out).size() == 26);
    CHECK(cli({"gen", "ip", "--k", "2,2", "--d", "1,1", "--depth", "2"}).code == 1);
}

TEST_CASE("cli: product, project, sumset, energy")
{
    TempDir dir;
    REQUIRE(cli({"gen", "polynomial", "--coeffs", "0,0,1", "--to", "50", "-o", dir / "a.jsonl"}).code == 0);
    REQUIRE(cli({"gen", "interval", "--to", "10", "-o", dir / "b.jsonl"}).code == 0);
    REQUIRE(cli({"gen", "product", dir / "a.jsonl", dir / "b.jsonl", "-o", dir / "ab.jsonl"}).code == 0);
    CHECK(latdim::io::read_set(fs::path(dir / "ab.jsonl")).size() == 500);
    CHECK(cli({"gen", "product", dir / "a.jsonl", dir / "b.jsonl", "--cap", "10"}).code == 1);

    auto r = cli({"project", dir / "ab.jsonl", "--matrix", "0.75", "-o", dir / "p.jsonl"});
    REQUIRE(r.code == 0);
    r = cli({"sumset", dir / "a.jsonl", dir / "b.jsonl", "--lambdas", "1,0.75", "-o", dir / "s.jsonl"});
    REQUIRE(r.code == 0);
    CHECK(latdim::io::read_set(fs::path(dir / "p.jsonl")) == latdim::io::read_set(fs::path(dir / "s.jsonl")));

    r = cli({"energy", dir / "ab.jsonl", "--matrix", "0.75", "--json"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["set_size"] == 500);
    CHECK(j["cauchy_schwarz"] == true);
    r = cli({"energy", dir / "ab.jsonl", "--matrix", "0.75"});
    CHECK(r.out.find("cauchy_schwarz=ok") != std::string::npos);
}

TEST_CASE("cli: cover, covdim, regular")
{
    TempDir dir;
    {
        std::ofstream f(dir / "pts.txt");
        f << "0\n1\n2\n50\n";
    }
    auto r = cli({"cover", dir / "pts.txt", "--cube", "0,100", "--alpha", "0.5", "--ratio", "0.1"});
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 3);
    CHECK(json::parse(ls[0])["side"] == 3);
    CHECK(json::parse(ls.back())["cost"].get<double>() == doctest::Approx(0.2732050807568877));
    CHECK(cli({"cover", dir / "pts.txt", "--cube", "0,100", "--alpha", "0.5", "--ratio", "0.001"}).code == 1);

    REQUIRE(cli({"gen", "cantor", "--base", "3", "--digits", "0,2", "--depth", "8", "-o", dir / "c.jsonl"}).code == 0);
    r = cli({"covdim", dir / "c.jsonl", "--alphas", "0:1:0.1", "-o", dir / "cov.csv"});
    REQUIRE(r.code == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary["estimate"].get<double>() > 0.4);
    CHECK(summary["estimate"].get<double>() < 0.8);
    CHECK(slurp(dir / "cov.csv").rfind("alpha,side,ratio,cost\n", 0) == 0);

    r = cli({"regular", dir / "c.jsonl", "--cube", "0,6561", "--alpha", "0.3"});
    REQUIRE(r.code == 0);
    const auto header = json::parse(lines(r.out).front());
    CHECK(header["sup_value"].get<double>() >= 2);
    CHECK(header["sup_value"].get<double>() < 3);
    CHECK(cli({"regular", dir / "c.jsonl", "--cube", "0,6561", "--alpha", "0.7"}).code == 1);
}

TEST_CASE("cli: mc writes report, csv and plot script")
{
    TempDir dir;
    {
        std::ofstream f(dir / "exp.json");
        f << R"({"sets": [{"family": "cantor", "base": 3, "digits": [0, 2], "depth": 6},
                          {"family": "cantor", "base": 3, "digits": [0, 2], "depth": 6}],
                 "k": 1, "samples": 8, "alpha": 1.27, "delta_grid": [0.1, 0.2]})";
    }
    auto r = cli({"mc", "marstrand", "--config", dir / "exp.json", "-o", dir / "rep.json"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    CHECK(fs::exists(dir / "rep.csv"));
    CHECK(fs::exists(dir / "rep_plot.py"));
    const auto rep = json::parse(slurp(dir / "rep.json"));
    CHECK(rep["per_sample"].size() == 8);

    r = cli({"--threads", "3", "mc", "marstrand", "--config", dir / "exp.json", "-o", dir / "rep3.json"});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "rep.json") == slurp(dir / "rep3.json"));

    r = cli({"mc", "delta", "--config", dir / "exp.json", "--seed", "5"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["rows"].size() == 2);
    CHECK(cli({"mc", "delta", "--config", dir / "exp.json", "--alpha", "1"}).code == 1);
    CHECK(cli({"mc", "marstrand", "--config", dir / "missing.json"}).code == 2);
}
