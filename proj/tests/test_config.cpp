#include <doctest.h>

#include <string>

#include <json.hpp>

#include "aigcfl/config.hpp"

using namespace aigcfl;
using nlohmann::json;

namespace {

json base_doc() {
    return json::parse(R"({
        "population": {
            "K": 4,
            "datasize": [50, 100],
            "cost": {"kind": "UD", "max": 0.1},
            "quality": {"kind": "UD", "max": 3.0}
        },
        "quality": {"lambda_max": 3.0, "g_data": 2.45, "g_diff": 1.05, "s_ai": 0.8},
        "learning": {"eta": 0.01, "rho": 37.36, "mu": 5.48, "beta": 0.57, "psi": 25.0, "h": 5},
        "server": {"gamma1": 10000.0, "gamma2": 1.0, "omega": 100.0},
        "experiment": {}
    })");
}

LoadedConfig parse(const json& doc) { return parse_scenario(doc.dump(), "test"); }

std::string error_of(const json& doc) {
    try {
        parse(doc);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("a minimal document parses with defaults") {
    LoadedConfig cfg = parse(base_doc());
    const ScenarioConfig& sc = cfg.scenario;
    CHECK(sc.population.K == 4);
    CHECK(sc.population.datasize_min == 50);
    CHECK(sc.population.datasize_max == 100);
    CHECK(sc.population.dist.cost.max() == doctest::Approx(0.1));
    CHECK(sc.population.dist.quality.max() == doctest::Approx(3.0));
    CHECK(sc.quality.lambda_max() == doctest::Approx(3.0));
    CHECK(sc.server.epsilon == doctest::Approx(1e-8));
    CHECK(sc.seeds == std::vector<std::uint64_t>{1});
    CHECK(sc.mechanism == MechanismKind::IMFL);
    CHECK(sc.info == InfoMode::Complete);
    CHECK(sc.mean_mode == MeanMode::Unnormalized);
    CHECK(sc.max_T == 10000);
    CHECK(sc.grid_points == 200);
    CHECK(sc.trials == 20000);
    CHECK(sc.threads == 1);
    CHECK_FALSE(sc.sweep.has_value());
    CHECK_FALSE(cfg.flsim.has_value());

    // Unspecified gap budget falls back to the derived default.
    LearningParams probe(0.01, 37.36, 5.48, 0.57, 25.0, 5, 1.0);
    CHECK(sc.learning.theta_gap == doctest::Approx(default_theta_gap(probe, 3.0)).epsilon(1e-12));
}

TEST_CASE("explicit experiment knobs override the defaults") {
    json doc = base_doc();
    doc["experiment"] = {
        {"seeds", {7, 8, 9}},
        {"mechanism", "NAIGC"},
        {"info", "incomplete"},
        {"mean_mode", "conditional"},
        {"max_T", 50},
        {"grid_points", 32},
        {"trials", 500},
        {"threads", 2},
        {"sweep", {{"var", "gamma1"}, {"values", {1.0, 2.0}}}},
    };
    doc["learning"]["theta_gap"] = 4.5;
    LoadedConfig cfg = parse(doc);
    const ScenarioConfig& sc = cfg.scenario;
    CHECK(sc.seeds == std::vector<std::uint64_t>{7, 8, 9});
    CHECK(sc.mechanism == MechanismKind::NAIGC);
    CHECK(sc.info == InfoMode::Incomplete);
    CHECK(sc.mean_mode == MeanMode::Conditional);
    CHECK(sc.max_T == 50);
    CHECK(sc.grid_points == 32);
    CHECK(sc.trials == 500);
    CHECK(sc.threads == 2);
    CHECK(sc.learning.theta_gap == doctest::Approx(4.5));
    REQUIRE(sc.sweep.has_value());
    CHECK(sc.sweep->var == SweepSpec::Var::Gamma);
    CHECK(sc.sweep->values == std::vector<double>{1.0, 2.0});
}

TEST_CASE("density kinds accept both spelling families") {
    json doc = base_doc();
    doc["population"]["cost"] = {{"kind", "LDD"}, {"max", 0.1}};
    doc["population"]["quality"] = {{"kind", "rising"}, {"max", 3.0}};
    LoadedConfig a = parse(doc);
    doc["population"]["cost"] = {{"kind", "falling"}, {"max", 0.1}};
    doc["population"]["quality"] = {{"kind", "LID"}, {"max", 3.0}};
    LoadedConfig b = parse(doc);
    CHECK(a.scenario.population.dist.cost.mean() ==
          doctest::Approx(b.scenario.population.dist.cost.mean()).epsilon(1e-15));
    CHECK(a.scenario.population.dist.quality.mean() ==
          doctest::Approx(b.scenario.population.dist.quality.mean()).epsilon(1e-15));

    doc["population"]["cost"] = {
        {"kind", "tabulated"}, {"knots", {0.0, 0.05, 0.1}}, {"pdf", {0.0, 20.0, 0.0}}};
    doc["population"]["quality"] = {{"kind", "UD"}, {"max", 3.0}};
    LoadedConfig c = parse(doc);
    CHECK(c.scenario.population.dist.cost.mean() == doctest::Approx(0.05).epsilon(1e-9));

    doc["population"]["cost"] = {{"kind", "gaussian"}, {"max", 0.1}};
    CHECK(mentions(error_of(doc), "population.cost.kind must be one of"));
}

TEST_CASE("every violation is reported in one error") {
    json doc = base_doc();
    doc["population"]["K"] = 0;
    doc["learning"].erase("eta");
    doc["server"]["gamma1"] = -1.0;
    doc["quality"]["bogus"] = 1.0;
    doc["extra_section"] = json::object();
    std::string msg = error_of(doc);
    CHECK(mentions(msg, "test: invalid configuration"));
    CHECK(mentions(msg, "client count must be at least 1"));
    CHECK(mentions(msg, "learning.eta is required"));
    CHECK(mentions(msg, "server:"));
    CHECK(mentions(msg, "quality: unknown key \"bogus\""));
    CHECK(mentions(msg, "top level: unknown key \"extra_section\""));
}

TEST_CASE("metadata keys are ignored") {
    json doc = base_doc();
    doc["_note"] = "free text";
    doc["population"]["_source"] = "hand-made";
    CHECK_NOTHROW(parse(doc));
}

TEST_CASE("an unstable step size is rejected at parse time") {
    json doc = base_doc();
    doc["learning"]["eta"] = 0.2;
    doc["learning"]["rho"] = 37.36;
    CHECK(mentions(error_of(doc), "learning:"));
}

TEST_CASE("divergence support above the cap is rejected") {
    json doc = base_doc();
    doc["population"]["quality"] = {{"kind", "UD"}, {"max", 3.5}};
    CHECK(mentions(error_of(doc), "divergence support exceeds lambda_max"));
}

TEST_CASE("seed and sweep arrays are validated") {
    json doc = base_doc();
    doc["experiment"]["seeds"] = json::array();
    CHECK(mentions(error_of(doc), "experiment.seeds must be a non-empty integer array"));
    doc = base_doc();
    doc["experiment"]["seeds"] = {1, -2};
    CHECK(mentions(error_of(doc), "non-negative integers"));
    doc = base_doc();
    doc["experiment"]["sweep"] = {{"var", "K"}, {"values", json::array()}};
    CHECK(mentions(error_of(doc), "experiment.sweep.values must be a non-empty numeric array"));
    doc = base_doc();
    doc["experiment"]["sweep"] = {{"var", "voltage"}, {"values", {1.0}}};
    CHECK(mentions(error_of(doc), "unknown sweep variable"));
    doc = base_doc();
    doc["experiment"]["mean_mode"] = "bogus";
    CHECK(mentions(error_of(doc), "mean_mode must be unnormalized or conditional"));
}

TEST_CASE("federation blocks parse with a default horizon") {
    json doc = base_doc();
    doc["experiment"]["flsim"] = {
        {"dimension", 6}, {"lambdas", {1.0, 0.5}}, {"datasizes", {60, 90}}};
    LoadedConfig cfg = parse(doc);
    REQUIRE(cfg.flsim.has_value());
    CHECK(cfg.flsim->dimension == 6);
    CHECK(cfg.flsim->rounds == 50);
    CHECK(cfg.flsim->lambdas == std::vector<double>{1.0, 0.5});
    CHECK(cfg.flsim->datasizes == std::vector<long long>{60, 90});

    doc["experiment"]["flsim"] = {{"dimension", 6}, {"lambdas", {1.0}}, {"datasizes", {60, 90}}};
    CHECK(mentions(error_of(doc), "equal-length non-empty arrays"));
}

TEST_CASE("malformed input fails with the origin attached") {
    CHECK_THROWS_AS(parse_scenario("{not json", "broken.json"), ConfigError);
    try {
        parse_scenario("[1, 2]", "broken.json");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(mentions(e.what(), "broken.json"));
    }
    CHECK_THROWS_AS(load_scenario("/nonexistent/path/config.json"), ConfigError);
}
