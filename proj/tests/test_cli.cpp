#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "she/app/config.hpp"
#include "she/app/experiments.hpp"
#include "she/errors.hpp"
#include "she/version.hpp"

using namespace she;
using namespace she::app;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch directory per test case, cleaned before use so reruns of the
// test binary never see stale artifacts.
fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "she_unit_cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string volterra_config(const fs::path& dir) {
    return std::string(R"({"schema":"she/1","experiment":"volterra","model":"cyclic2",)") +
           R"("lambda":2.5,"t":0.8,"output":{"directory":")" + dir.string() +
           R"(","formats":["csv","json"]}})";
}

} // namespace

TEST_CASE("minimal config parses with documented defaults") {
    const ExperimentConfig cfg = parse_config_text(
        R"({"schema":"she/1","experiment":"volterra","model":"cyclic2","lambda":1.5})");
    CHECK(cfg.experiment == ExperimentKind::Volterra);
    REQUIRE(cfg.model_id.has_value());
    CHECK(*cfg.model_id == "cyclic2");
    REQUIRE(cfg.lambda.has_value());
    CHECK(*cfg.lambda == 1.5);
    CHECK(cfg.t == 1.0);
    CHECK(cfg.seed == kDefaultSeed);
    CHECK(cfg.output_dir == "out");
    REQUIRE(cfg.formats.size() == 2);
    CHECK_FALSE(cfg.canonical.empty());
}

TEST_CASE("strict parsing rejects malformed documents") {
    CHECK_THROWS_AS(parse_config_text("not json at all"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"schema":"she/2","experiment":"volterra"})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(
            R"({"schema":"she/1","experiment":"volterra","model":"cyclic2","lambda":1,"zzz":0})"),
        ConfigError);
    // catalog id and explicit group are mutually exclusive
    CHECK_THROWS_AS(parse_config_text(R"({"schema":"she/1","experiment":"kernel",
        "model":"cyclic2","group":{"kind":"cyclic","n":3},
        "levy":{"kind":"cyclic_rates","rates":[1,1]}})"),
                    ConfigError);
    // group without levy
    CHECK_THROWS_AS(parse_config_text(R"({"schema":"she/1","experiment":"kernel",
        "group":{"kind":"cyclic","n":3}})"),
                    ConfigError);
    // per-experiment requirements
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"volterra","model":"cyclic2"})"),
        ConfigError); // no lambda
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"sweep","model":"cyclic2",
            "lambda":3.0})"),
        ConfigError); // scalar lambda where a grid table is required
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"upsilon","model":"cyclic2"})"),
        ConfigError); // no beta grid
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"invariance","model":"cyclic5",
            "lambda":1.0})"),
        ConfigError); // no automorphism
    // grid sanity: min < max, points >= 2
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"sweep","model":"cyclic2",
            "lambda":{"min":5.0,"max":1.0,"points":9}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"sweep","model":"cyclic2",
            "lambda":{"min":1.0,"max":5.0,"points":1}})"),
        ConfigError);
    // output block is strict too
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"volterra","model":"cyclic2",
            "lambda":1.0,"output":{"dir":"x"}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"volterra","model":"cyclic2",
            "lambda":1.0,"output":{"formats":["xml"]}})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_config_text(R"({"schema":"she/1","experiment":"volterra","model":"cyclic2",
            "lambda":1.0,"t":-1.0})"),
        ConfigError);
}

TEST_CASE("grid tables materialize log or linear spacing") {
    ExperimentConfig cfg = parse_config_text(
        R"({"schema":"she/1","experiment":"sweep","model":"cyclic2",
            "lambda":{"min":1.0,"max":100.0,"points":3}})");
    REQUIRE(cfg.lambda_grid.has_value());
    const std::vector<double> lg = cfg.lambda_grid->materialize();
    REQUIRE(lg.size() == 3);
    CHECK(lg[0] == 1.0);
    CHECK(lg[1] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(lg[2] == 100.0);

    cfg = parse_config_text(
        R"({"schema":"she/1","experiment":"sweep","model":"cyclic2",
            "lambda":{"min":1.0,"max":3.0,"points":5,"log":false}})");
    const std::vector<double> lin = cfg.lambda_grid->materialize();
    REQUIRE(lin.size() == 5);
    CHECK(lin[1] == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(lin[3] == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("schema text documents the format") {
    const std::string s = schema_text();
    CHECK(s.find("she/1") != std::string::npos);
    CHECK(s.find("volterra") != std::string::npos);
    CHECK(s.find("output") != std::string::npos);
}

TEST_CASE("FNV-1a matches the published test vectors") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(fnv1a("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("kernel experiment writes artifacts and a faithful manifest") {
    const fs::path dir = scratch("kernel");
    const ExperimentConfig cfg = parse_config_text(
        std::string(R"({"schema":"she/1","experiment":"kernel","model":"cyclic6","t":0.5,)") +
        R"("output":{"directory":")" + dir.string() + R"(","formats":["csv","json"]}})");
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(dir / "kernel.csv"));
    CHECK(fs::exists(dir / "kernel.json"));
    CHECK(fs::exists(dir / "manifest.json"));

    const json manifest = json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.at("schema") == "she/1");
    CHECK(manifest.at("tool_version") == std::string(kVersion));
    char expect[24];
    std::snprintf(expect, sizeof expect, "%016llx",
                  static_cast<unsigned long long>(fnv1a(cfg.canonical)));
    CHECK(manifest.at("config_hash_fnv1a") == std::string(expect));
    // every file the run reported, except the manifest itself, is listed
    for (const std::string& f : res.files)
        CHECK(fs::exists(dir / f));
    CHECK(manifest.at("outputs").size() + 1 == res.files.size());

    // CSV numbers must be locale-independent: '.' decimal separator only
    const std::string csv = slurp(dir / "kernel.csv");
    CHECK(csv.find('.') != std::string::npos);
    CHECK(csv.find(';') == std::string::npos);
}

TEST_CASE("identical configs produce byte-identical data artifacts") {
    const fs::path a = scratch("rerun_a");
    const fs::path b = scratch("rerun_b");
    run_experiment(parse_config_text(volterra_config(a)));
    run_experiment(parse_config_text(volterra_config(b)));
    CHECK(slurp(a / "energy.csv") == slurp(b / "energy.csv"));
    const std::string ja = slurp(a / "energy.json");
    CHECK(ja == slurp(b / "energy.json"));
    CHECK_FALSE(ja.empty());
}

TEST_CASE("SHE_OUTPUT_DIR overrides the configured directory") {
    const fs::path cfg_dir = scratch("env_cfg");
    const fs::path env_dir = scratch("env_override");
    REQUIRE(::setenv("SHE_OUTPUT_DIR", env_dir.string().c_str(), 1) == 0);
    run_experiment(parse_config_text(volterra_config(cfg_dir)));
    ::unsetenv("SHE_OUTPUT_DIR");
    CHECK(fs::exists(env_dir / "energy.csv"));
    CHECK_FALSE(fs::exists(cfg_dir / "energy.csv"));
}

TEST_CASE("failure taxonomy: numeric refusals vs config refusals") {
    const fs::path dir = scratch("failures");
    // Dalang condition fails: the experiment must raise a numeric error
    const ExperimentConfig bad_model = parse_config_text(
        std::string(R"({"schema":"she/1","experiment":"volterra",)") +
        R"("group":{"kind":"real_line","halfwidth":10.0,"resolution":400},)" +
        R"("levy":{"kind":"stable","alpha":0.9},"lambda":1.0,)" +
        R"("output":{"directory":")" + dir.string() + R"("}})");
    CHECK_THROWS_AS(run_experiment(bad_model), NumericError);

    // dt violating the jump-rate rule is a configuration error
    const ExperimentConfig bad_dt = parse_config_text(
        std::string(R"({"schema":"she/1","experiment":"mc","model":"cyclic6","lambda":1.0,)") +
        R"("numerics":{"dt":0.5},"output":{"directory":")" + dir.string() + R"("}})");
    CHECK_THROWS_AS(run_experiment(bad_dt), ConfigError);
}

TEST_CASE("verification experiments report failure through the exit code") {
    const fs::path dir = scratch("localtime");
    const ExperimentConfig cfg = parse_config_text(
        std::string(R"({"schema":"she/1","experiment":"localtime","model":"trivial",)") +
        R"("numerics":{"n_paths":10},"output":{"directory":")" + dir.string() +
        R"(","formats":["json"]}})");
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 0); // the identity is exact on the one-point group
    const json report = json::parse(slurp(dir / "localtime.json"));
    CHECK(report.at("ok") == true);
    CHECK(report.at("lhs") == 1.0);
}
