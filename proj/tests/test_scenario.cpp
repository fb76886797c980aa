#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "dicke/config.hpp"
#include "dicke/errors.hpp"
#include "dicke/output.hpp"
#include "dicke/scenario.hpp"

using namespace dicke;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dicke_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("scenario catalogue") {
    const auto list = list_scenarios();
    CHECK(list.size() >= 9);
    for (const char* name : {"superradiance-n3", "superradiance-n4", "superradiance-n5", "superradiance-kappa-sweep",
                             "three-level-compare", "bistability-q", "bistability-peak-sweep",
                             "multistability-n3-scaled", "custom"}) {
        CAPTURE(name);
        CHECK(std::any_of(list.begin(), list.end(), [&](const PresetInfo& p) { return p.name == name; }));
    }
    for (const auto& p : list) {
        CAPTURE(p.name);
        const ScenarioConfig cfg = preset(p.name);
        CHECK(cfg.scenario == p.name);
        CHECK_NOTHROW(validate(cfg));
    }
    CHECK_THROWS_AS(preset("no-such-scenario"), ConfigError);
}

TEST_CASE("preset values") {
    const ScenarioConfig n5 = preset("superradiance-n5");
    CHECK(n5.spec.n_qubits == 5);
    CHECK(n5.spec.g_mhz == std::vector<double>{59.0, 59.4, 59.9, 60.9, 60.7});
    CHECK(n5.spec.kappa_mhz == 2000.0);

    const SystemSpec s = to_system_spec(preset("superradiance-n3").spec);
    CHECK(std::abs(s.kappa - 2000.0 * 2.0 * std::numbers::pi) < 1e-9);
    CHECK(s.gamma_s.size() == 3);
    CHECK(s.gamma_p == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("config round trip through JSON") {
    for (const auto& p : list_scenarios()) {
        CAPTURE(p.name);
        const Json j = to_json(preset(p.name));
        CHECK(to_json(config_from_json(j)) == j);
    }
}

TEST_CASE("strict config parsing") {
    Json j = to_json(preset("custom"));
    SUBCASE("unknown key") {
        j["spec"]["colour"] = "red";
        CHECK_THROWS_AS(config_from_json(j), ConfigError);
    }
    SUBCASE("wrong type") {
        j["spec"]["n_qubits"] = "three";
        CHECK_THROWS_AS(config_from_json(j), ConfigError);
    }
    SUBCASE("list length") {
        j["spec"]["g_mhz"] = {80.0, 81.0};
        CHECK_THROWS_AS(validate(config_from_json(j)), ConfigError);
    }
    SUBCASE("unknown kind") {
        j["kind"] = "teleportation";
        CHECK_THROWS_AS(validate(config_from_json(j)), ConfigError);
    }
}

TEST_CASE("dotted overrides") {
    Json j = to_json(preset("custom"));
    apply_override(j, "spec.kappa_mhz=1500");
    apply_override(j, "spec.g_mhz=[70, 71, 72]");
    apply_override(j, "numerics.integrator=krylov");
    const ScenarioConfig cfg = config_from_json(j);
    CHECK(cfg.spec.kappa_mhz == 1500.0);
    CHECK(cfg.spec.g_mhz == std::vector<double>{70.0, 71.0, 72.0});
    CHECK(cfg.numerics.integrator == "krylov");
    CHECK_THROWS_AS(apply_override(j, "spec.bogus=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(j, "no-equals-sign"), ConfigError);
}

TEST_CASE("config files allow comments") {
    const fs::path dir = scratch("cfg");
    fs::create_directories(dir);
    Json j = to_json(preset("custom"));
    {
        std::ofstream out(dir / "c.json");
        out << "// hand-written\n" << j.dump(2) << "\n";
    }
    CHECK(to_json(load_config((dir / "c.json").string())) == j);
    CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("number formatting") {
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("CSV files carry the config as a comment header") {
    const fs::path dir = scratch("csv");
    const Json cfg{{"scenario", "x"}, {"value", 2}};
    write_csv(dir / "sub" / "t.csv", cfg, {"a", "b"}, {{1.0, 2.5}, {3.0, -4.0}});
    std::istringstream in(slurp(dir / "sub" / "t.csv"));
    std::string line;
    std::vector<std::string> header, body;
    while (std::getline(in, line)) (line.rfind("# ", 0) == 0 ? header : body).push_back(line);
    std::string joined;
    for (const auto& h : header) joined += h.substr(2) + "\n";
    CHECK(Json::parse(joined) == cfg);
    REQUIRE(body.size() == 3);
    CHECK(body[0] == "a,b");
    CHECK(body[1] == "1,2.5");
    CHECK(body[2] == "3,-4");
    fs::remove_all(dir);
}

TEST_CASE("scenario runs are reproducible to the byte") {
    const ScenarioConfig cfg = preset("custom");
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    RunOptions oa, ob;
    oa.out_dir = a.string();
    ob.out_dir = b.string();
    const ScenarioResult ra = run_scenario(cfg, oa);
    const ScenarioResult rb = run_scenario(cfg, ob);
    CHECK(ra.passed());
    REQUIRE(ra.files.size() == rb.files.size());
    CHECK(ra.files.size() >= 2);
    for (const auto& f : ra.files) {
        CAPTURE(f);
        const fs::path name = fs::path(f).filename();
        CHECK(slurp(a / name) == slurp(b / name));
    }
    CHECK(ra.summary.contains("relative_peak_error"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("scenario errors keep their type") {
    ScenarioConfig cfg = preset("bistability-q");
    cfg.spec.gamma_s_mhz = {8.0};
    CHECK_THROWS_AS(run_scenario(cfg, {std::nullopt, 1, false}), ConfigError);

    ScenarioConfig big = preset("multistability-n3-full");
    CHECK_THROWS_AS(run_scenario(big, {std::nullopt, 1, false}), ResourceError);
}
