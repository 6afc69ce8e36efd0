#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "plapsys/config.hpp"
#include "plapsys/error.hpp"
#include "plapsys/report.hpp"

using namespace plapsys;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;
};

std::string bin() {
    const char* b = std::getenv("PLAPSYS_BIN");
    return b ? b : "plapsys";
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("plapsys_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.ini";
    std::ofstream(p) << text;
    return p;
}

Run run(const std::string& args) {
    Run r;
    FILE* f = ::popen((bin() + " " + args + " 2>&1").c_str(), "r");
    REQUIRE(f != nullptr);
    char buf[4096];
    while (size_t n = std::fread(buf, 1, sizeof buf, f)) r.output.append(buf, n);
    const int st = ::pclose(f);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Json report(const fs::path& dir) { return Json::parse(slurp(dir / "report.json")); }

const char* kSymC2 = "[params]\nN = 5\np = 2.2\nmu1 = 1\nmu2 = 1\ngamma = 3.1428571428571428\n";

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("# top\n[params]\nN = 5  # dims\np = 2.2\n[coupling]\nladder = 0.1, 0.2,0.3\n");
    CHECK(c.get_int("params", "N", 0) == 5);
    CHECK(c.get_list("coupling", "ladder", {}).size() == 3);
    CHECK(c.get_double("params", "gamma", 7) == 7);
    try {
        Config::parse("[params]\nN = 5\np = two\n").get_double("params", "p", 0);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key == "p");
        CHECK(e.line == 3);
    }
    CHECK_THROWS_AS(Config::parse("[params]\nNN = 5\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("N = 5\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[params]\nN 5\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("[nope]\n"), ConfigError);
    CHECK_THROWS_AS(params_from(Config::parse("[params]\nN = 5\np = 2.2\na = 1.1\nb = 1.2\n")), ConfigError);
}

TEST_CASE("canonical JSON round trip") {
    Json j{{"b", 0.1}, {"a", Json::array({1.0 / 3, num(INFINITY), num(NAN)})}, {"c", Json::object()}};
    const std::string s = dump_canonical(j);
    CHECK(s.find("\"a\"") < s.find("\"b\""));
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("\"inf\"") != std::string::npos);
    CHECK(s.find("\"nan\"") != std::string::npos);
    CHECK(dump_canonical(Json::parse(s)) == s);
    CHECK(csv_num(1.0 / 3) == "0.333333333333");
}

TEST_CASE("sobolev command") {
    const auto d = scratch("sobolev");
    const auto cfg = write_config(d, "[params]\nN = 4\np = 2\n");
    const auto r = run("--config " + cfg.string() + " --out " + (d / "a").string() + " sobolev");
    CHECK(r.code == 0);
    const Json j = report(d / "a");
    const double g = j["outputs"]["grad_p"], c = j["outputs"]["crit"];
    CHECK(std::abs(g - c) / c < 1e-8);
    CHECK(j["schema_version"] == kSchemaVersion);
    CHECK(j["passed"] == true);
    // round trip of the written text
    CHECK(dump_canonical(j) == slurp(d / "a" / "report.json"));

    // determinism modulo timestamp
    run("--config " + cfg.string() + " --out " + (d / "b").string() + " sobolev");
    Json a = report(d / "a"), b = report(d / "b");
    a.erase("timestamp");
    b.erase("timestamp");
    CHECK(dump_canonical(a) == dump_canonical(b));
    for (const auto& e : fs::directory_iterator(d / "a")) CHECK(e.path().extension() != ".tmp");
}

TEST_CASE("malformed config names the key") {
    const auto d = scratch("bad");
    const auto cfg = write_config(d, "[params]\nN = 4\np = 2x\n");
    const auto r = run("--config " + cfg.string() + " sobolev");
    CHECK(r.code == 2);
    CHECK(r.output.find("'p'") != std::string::npos);
    CHECK(r.output.find("line 3") != std::string::npos);
    CHECK(run("--config " + (d / "missing.ini").string() + " sobolev").code == 2);
    CHECK(run("sobolev").code == 2);
}

TEST_CASE("coupling solve, certify and continue") {
    const auto d = scratch("coupling");
    const auto cfg = write_config(d, kSymC2);
    auto r = run("--config " + cfg.string() + " --out " + (d / "solve").string() + " coupling solve");
    CHECK(r.code == 0);
    Json j = report(d / "solve");
    const double k = j["outputs"]["minimal_pair"]["k"], l = j["outputs"]["minimal_pair"]["l"];
    const double want = std::pow(1 + 3.1428571428571428 / 2, -14.0 / 11);
    CHECK(std::abs(k - want) < 1e-10);
    CHECK(std::abs(l - want) < 1e-10);
    CHECK(fs::exists(d / "solve" / "solution.csv"));

    const auto c1 = write_config(d, "[params]\nN = 4\np = 2.5\nmu1 = 1\nmu2 = 1\ngamma = 1.6666666666666667\n");
    r = run("--config " + c1.string() + " --out " + (d / "cert").string() + " coupling certify");
    CHECK(r.code == 0);
    CHECK(report(d / "cert")["outputs"]["prop_p1"]["holds"] == true);

    const auto cont = write_config(d, std::string(kSymC2) + "[coupling]\nladder = 0.5, 1, 1.5, 2, 2.5\n");
    r = run("--config " + cont.string() + " --out " + (d / "cont").string() + " coupling continue");
    CHECK(r.code == 0);
    j = report(d / "cont");
    CHECK(j["outputs"]["stop_reason"] != "completed");
    CHECK(j["outputs"]["gamma1_estimate"].get<double>() == doctest::Approx(11.0 / 7).epsilon(1e-6));
    const std::string csv = slurp(d / "cont" / "branch.csv");
    CHECK(csv.rfind("gamma,k,l,res1,res2,jacobian_det,energy_level\n", 0) == 0);
}

TEST_CASE("verify guards") {
    const auto d = scratch("guards");
    auto cfg = write_config(d, kSymC2);
    auto r = run("--config " + cfg.string() + " --out " + (d / "t1").string() + " verify theorem1");
    CHECK(r.code == 3);
    CHECK(r.output.find("γ < 0 required") != std::string::npos);
    CHECK(report(d / "t1")["passed"] == false);

    cfg = write_config(d, "[params]\nN = 9\np = 2.5\nmu1 = 0\nmu2 = 0\ngamma = 1\nlambda = 1\n[mp]\nlambda_fraction = 1.5\n");
    r = run("--config " + cfg.string() + " verify mp_level");
    CHECK(r.code == 3);
    CHECK(r.output.find("lambda < p/(a^a b^b)^{1/p} lambda1") != std::string::npos);
}

TEST_CASE("verify theorem2 with a short random sample") {
    const auto d = scratch("t2");
    const auto cfg = write_config(d, std::string(kSymC2) + "[energy]\nsamples = 5\nseed = 3\nrandom_rel_tol = 1e-6\n");
    const auto r = run("--config " + cfg.string() + " --out " + (d / "o").string() + " verify theorem2");
    CHECK(r.code == 0);
    const Json j = report(d / "o");
    CHECK(j["checks"][0]["name"] == "theorem2_rel_gap");
    CHECK(j["checks"][0]["value"].get<double>() < 1e-6);
}

TEST_CASE("sweep") {
    const auto d = scratch("sweep");
    const auto cfg = write_config(d, std::string(kSymC2) + "[sweep]\nparam = gamma\nladder = 1.6, 2, 2.5, 3, 4\n");
    auto r = run("--config " + cfg.string() + " --out " + (d / "p1").string() + " --parallel 1 sweep");
    CHECK(r.code == 0);
    run("--config " + cfg.string() + " --out " + (d / "p4").string() + " --parallel 4 sweep");
    const std::string a = slurp(d / "p1" / "sweep.csv"), b = slurp(d / "p4" / "sweep.csv");
    CHECK(a == b);
    CHECK(fs::exists(d / "p1" / "point_004" / "report.json"));
    // energy column decreases with gamma in the symmetric case
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    double prev = INFINITY;
    int rows = 0;
    while (std::getline(in, line)) {
        std::vector<std::string> cols;
        std::stringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cols.push_back(c);
        const double e = std::stod(cols[6]);
        CHECK(e < prev);
        prev = e;
        ++rows;
    }
    CHECK(rows == 5);

    // a failing point makes the sweep exit nonzero but the other points still run
    const auto mixed = write_config(d, std::string(kSymC2) + "[sweep]\nparam = gamma\nladder = 1, 2\n");
    r = run("--config " + mixed.string() + " --out " + (d / "m").string() + " sweep");
    CHECK(r.code == 1);
    CHECK(fs::exists(d / "m" / "point_001" / "report.json"));

    const auto empty = write_config(d, std::string(kSymC2) + "[sweep]\nparam = gamma\n");
    CHECK(run("--config " + empty.string() + " sweep").code == 2);
    const auto unsorted = write_config(d, std::string(kSymC2) + "[sweep]\nparam = gamma\nladder = 2, 1.7, 3\n");
    CHECK(run("--config " + unsorted.string() + " sweep").code == 2);
}
