#include <catch_amalgamated.hpp>

#include <filesystem>

#include "dynmcda/config.hpp"
#include "dynmcda/report.hpp"

using namespace dynmcda;

namespace {

std::string field_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "ok";
}

}  // namespace

TEST_CASE("empty documents give the case-study defaults", "[config]") {
  for (const char* text : {"", "{}", "  \n"}) {
    const auto c = parse_config(text);
    CHECK(c.options.size() == 3);
    CHECK(c.criteria.size() == 8);
    CHECK(c.masterSeed == 20240101);
    CHECK(c.sensitivity.iterations == 10000);
    CHECK(c.sensitivity.amplitude == 0.1);
    CHECK(c.sensitivityVariants.size() == 3);
    CHECK(c.vtg.entries().size() == 3);
    CHECK(c.ltp.entries().size() == 3);
    CHECK(c.weights().at("cost_total") == 0.25);
  }
}

TEST_CASE("the case-study distributions are accepted", "[config]") {
  const auto c = parse_config(R"({
    "vtg": [{"value": 1.0, "probability": 0.5}, {"value": 1.15, "probability": 0.25},
            {"value": 1.3, "probability": 0.25}],
    "ltp": [{"value": 37.5, "probability": 0.25}, {"value": 43.04, "probability": 0.5},
            {"value": 48.59, "probability": 0.25}]
  })");
  CHECK(build_scenario_set(c.vtg, c.ltp).size() == 9);
}

TEST_CASE("weights must sum to one", "[config][errors]") {
  CHECK(field_of(R"({"criteria": {"weights": {"cost_total": 0.15}}})") == "criteria.weights");
  CHECK(field_of(R"({"criteria": {"weights": {"cost_total": -0.1}}})") == "criteria.weights.cost_total");
  CHECK(field_of(R"({"criteria": {"weights": {"cost_total": 0.3, "traffic_profit": 0.2}}})") == "ok");
}

TEST_CASE("errors name the offending field", "[config][errors]") {
  CHECK(field_of("{") == "config");
  CHECK(field_of("[]") == "config");
  CHECK(field_of(R"({"colour": 1})") == "colour");
  CHECK(field_of(R"({"simulation": {"runDays": "ten"}})") == "simulation.runDays");
  CHECK(field_of(R"({"simulation": {"runDays": 1.5}})") == "simulation.runDays");
  CHECK(field_of(R"({"simulation": {"replicas": 3}})") == "simulation.replicas");
  CHECK(field_of(R"({"simulation": {"peakModel": "sometimes"}})") == "simulation.peakModel");
  CHECK(field_of(R"({"financial": {"laneCost": true}})") == "financial.laneCost");
  CHECK(field_of(R"({"criteria": {"weights": {"beauty": 0.1}}})") == "criteria.weights.beauty");
  CHECK(field_of(R"({"criteria": {"binary": {"road_safety": {"one": true}}}})") == "criteria.binary.road_safety.one");
  CHECK(field_of(R"({"criteria": {"binary": {"road_safety": {"1": "yes"}}}})") == "criteria.binary.road_safety.1");
  CHECK(field_of(R"({"sensitivity": {"variants": ["sideways"]}})") == "sensitivity.variants");
  CHECK(field_of(R"({"sensitivity": {"iterations": -5}})") == "sensitivity.iterations");
  CHECK(field_of(R"({"sensitivity": {"frozenCriteria": ["beauty"]}})") == "sensitivity.frozenCriteria");
  CHECK(field_of(R"({"options": [{"name": "no id"}]})") == "options[0].id");
  CHECK(field_of(R"({"options": [{"id": 1}, {"id": 1}]})").starts_with("options[1]"));
  CHECK(field_of(R"({"vtg": [{"value": 1.0, "probability": 0.4}]})").starts_with("vtg"));
  CHECK(field_of(R"({"masterSeed": -1})") == "masterSeed");
}

TEST_CASE("binary judgements must cover every option", "[config][errors]") {
  CHECK(field_of(R"({"options": [{"id": 1}, {"id": 2}, {"id": 3}, {"id": 4}]})").starts_with("criteria.binary"));
}

TEST_CASE("overrides are applied", "[config]") {
  const auto c = parse_config(R"({
    "masterSeed": 7,
    "simulation": {"runDays": 3, "warmupDays": 1, "replications": 2},
    "criteria": {"monetaryIndicator": true, "binary": {"job_opportunities": {"1": true, "2": false, "3": true}}},
    "sensitivity": {"variants": ["allCriteria"], "amplitude": 0.2, "iterations": 50}
  })");
  CHECK(c.masterSeed == 7);
  CHECK(c.simulation.runDays == 3);
  CHECK(c.simulation.replications == 2);
  CHECK(c.normalization.monetaryIndicator);
  CHECK(c.binaries.values.at("job_opportunities").at(1));
  CHECK_FALSE(c.binaries.values.at("job_opportunities").at(2));
  CHECK(c.sensitivityVariants == std::vector{SensitivityVariant::allCriteria});
  CHECK(c.sensitivity.amplitude == 0.2);
  CHECK(c.sensitivity.iterations == 50);
}

TEST_CASE("resolved configuration round-trips", "[config][property]") {
  const auto c = parse_config(R"({"masterSeed": 99, "sensitivity": {"iterations": 123}})");
  const json once = config_to_json(c);
  const json twice = config_to_json(config_from_json(once));
  CHECK(once == twice);
  CHECK(once.dump() == twice.dump());
}

TEST_CASE("load_config reads files", "[config]") {
  const auto path = std::filesystem::temp_directory_path() / "dynmcda_test_config.json";
  write_text_file(path.string(), R"({"masterSeed": 5})");
  CHECK(load_config(path.string()).masterSeed == 5);
  std::filesystem::remove(path);
  try {
    (void)load_config(path.string());
    FAIL("missing file accepted");
  } catch (const ValidationError& e) {
    CHECK(e.field() == "config");
  }
}

TEST_CASE("hash helpers", "[config]") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
  CHECK(hex64(0) == "0000000000000000");
}
