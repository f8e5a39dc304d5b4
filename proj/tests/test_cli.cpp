#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wkit/cli.hpp"

namespace {

struct Run {
    int code;
    std::string out, err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "wkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = wkit::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("wkit_cli_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("invariants") {
    const Run flat = run({"invariants", "--eq", "0", "--at", "0,0,0,0"});
    REQUIRE(flat.code == 0);
    CHECK(flat.json()["points"][0]["W"] == 0.0);
    const Run q = run({"invariants", "--eq", "q", "--at", "0,0,0,0"});
    CHECK(std::abs(q.json()["points"][0]["W"].get<double>() - 2.0 / 27) <= 1e-12);
    const Run c = run({"invariants", "--eq", "3*q^2/(2*p)", "--at", "0,1,1,1"});
    CHECK(std::abs(c.json()["points"][0]["W"].get<double>()) <= 1e-12);
    CHECK(c.json()["config"]["eq"] == "3*q^2/(2*p)");
}

TEST_CASE("exit codes") {
    const Run bad = run({"invariants", "--eq", "sin(", "--at", "0,0,0,0"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("position 4") != std::string::npos);
    CHECK(run({"geometry", "--eq", "q+"}).code == 2);
    CHECK(run({"invariants", "--eq", "q", "--at", "0,0"}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"invariants", "--eq", "3*q^2/(2*p)", "--at", "0,1,0,1"}).code == 1);
    CHECK(run({"curvature", "--eq", "q^2", "--base", "0,0,0,1", "--interval", "0,5"}).code == 1);
}

TEST_CASE("determinism") {
    const std::vector<std::string> args{"curvature", "--eq", "y*q+sin(p)", "--base", "0,0.1,-0.2,0.3", "--grid", "5"};
    const Run a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.json()["max_relative_difference"].get<double>() <= 1e-5);
    CHECK(a.json()["osculation_exponent"].get<double>() >= 4.8);
}

TEST_CASE("geometry writes CSV files and an axiom report") {
    const auto dir = scratch("geometry");
    const Run r = run({"geometry", "--eq", "q", "--base", "0,0,1,1", "--grid", "9", "--geodesics", "2", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const auto j = r.json();
    CHECK(j["axioms"]["all_pass"] == true);
    CHECK(j["geodesics"]["max_hausdorff"].get<double>() <= 1e-5);
    CHECK(std::filesystem::exists(dir / "polar.csv"));
    CHECK(std::filesystem::exists(dir / "indicatrix.csv"));
    CHECK(std::filesystem::exists(dir / "geometry.json"));
    std::ifstream polar(dir / "polar.csv");
    std::string header;
    std::getline(polar, header);
    CHECK(header == "t,v1,v2,v3");
    std::filesystem::remove_all(dir);
}

TEST_CASE("geodesic and incidence") {
    const Run g = run({"geodesic", "--eq", "q", "--base", "0,0,1,1", "--steps", "8"});
    REQUIRE(g.code == 0);
    CHECK(g.json()["hausdorff"].get<double>() <= 1e-5);
    const Run i = run({"incidence", "--eq", "0", "--with", "0,0,1", "--interval", "-2,2", "--grid", "5"});
    REQUIRE(i.code == 0);
    CHECK(i.json()["incident"] == true);
    CHECK(std::abs(i.json()["x"].get<double>()) <= 1e-8);
    const Run n = run({"incidence", "--eq", "0", "--with", "1,0,0", "--interval", "-2,2"});
    CHECK(n.json()["incident"] == false);
}

TEST_CASE("inverse and classify") {
    const Run q = run({"inverse", "--eq", "q", "--base", "0,0.1,0.2,0.3", "--t0", "0.2", "--t0", "-0.4"});
    REQUIRE(q.code == 0);
    for (const auto& rep : q.json()["reports"]) {
        CHECK(rep["tag"] == "RANK5_CAUSAL");
        CHECK(rep["distance_to_generating_point"].get<double>() <= 1e-6);
    }
    const Run flat = run({"inverse", "--eq", "0", "--t0", "0.2"});
    CHECK(flat.json()["reports"][0]["tag"] == "RANK1_WUENSCHMANN_ZERO");

    const auto dir = scratch("inverse");
    REQUIRE(run({"inverse", "--eq", "q", "--grid", "81", "--t0", "0", "--out", dir.string()}).code == 0);
    const Run csv = run({"inverse", "--family", (dir / "conics.csv").string(), "--t0", "0.3", "--tol-rank", "1e-6"});
    REQUIRE(csv.code == 0);
    CHECK(csv.json()["reports"][0]["tag"] == "RANK5_CAUSAL");
    CHECK(run({"inverse", "--family", (dir / "missing.csv").string()}).code == 2);
    std::filesystem::remove_all(dir);

    CHECK(run({"classify", "--eq", "q", "--at", "0.1,0.2,0.3,0.4"}).json()["tag"] == "NONZERO_WUENSCHMANN");
    CHECK(run({"classify", "--eq", "3*q^2/(2*p)", "--at", "0,1,1,1"}).json()["tag"] == "VANISHING_WUENSCHMANN");
    CHECK(run({"classify", "--eq", "q", "--perturb", "0.1", "--at", "0.1,0.2,0.3,0.4"}).json()["tag"] == "NOT_FROM_ODE");
}

TEST_CASE("TOML configuration with flag overrides") {
    const auto dir = scratch("config");
    std::filesystem::create_directories(dir);
    {
        std::ofstream cfg(dir / "job.toml");
        cfg << "eq = \"q\"\nat = [\"0,0,0,0\"]\n";
    }
    const Run a = run({"invariants", "--config", (dir / "job.toml").string()});
    REQUIRE(a.code == 0);
    CHECK(a.json()["config"]["eq"] == "q");
    const Run b = run({"invariants", "--config", (dir / "job.toml").string(), "--eq", "0"});
    CHECK(b.json()["points"][0]["W"] == 0.0);
    std::filesystem::remove_all(dir);
}
