#include <catch_amalgamated.hpp>

#include <thread>

#include "dynmcda/dynmcda.hpp"
#include "dynmcda/service.hpp"

using namespace dynmcda;
using Catch::Approx;

namespace {

RunArtifact bypass_artifact() {
  PipelineConfig c;
  c.bypassSimulationTable = std::string(DYNMCDA_DATA_DIR) + "/case_study_simulation_table.csv";
  c.sensitivity.iterations = 500;
  return run_pipeline(c);
}

const RunArtifact& artifact() {
  static const RunArtifact a = bypass_artifact();
  return a;
}

Service& service() {
  static Service s(artifact());
  return s;
}

json case_weights() {
  json w = json::object();
  for (const auto& c : defaults::criteria_catalog()) w[c.id] = c.weight;
  return w;
}

}  // namespace

TEST_CASE("every route carries the provenance hash", "[service]") {
  const auto hash = artifact().provenance.configHash;
  CHECK(service().provenance_hash() == hash);
  for (const auto& [method, path, body] : std::vector<std::tuple<std::string, std::string, std::string>>{
           {"GET", "/api/artifact", ""},
           {"GET", "/api/config", ""},
           {"GET", "/api/simulation", ""},
           {"POST", "/api/score", "{}"},
           {"POST", "/api/score/matrix", "{}"},
           {"POST", "/api/sensitivity", R"({"iterations": 100})"},
           {"POST", "/api/score", R"({"weights": {"cost_total": 2}})"},
           {"GET", "/api/nothing", ""}}) {
    INFO(method << " " << path);
    const auto r = service().handle(method, path, body);
    CHECK(r.body["provenance"]["configHash"] == hash);
    CHECK(r.body["provenance"]["seed"] == 20240101);
  }
}

TEST_CASE("GET endpoints expose the cached run", "[service]") {
  const auto a = service().handle("GET", "/api/artifact", "");
  CHECK(a.status == 200);
  CHECK(a.body["rankings"]["dynamicMcda"]["order"] == json::array({2, 1, 3}));
  CHECK(a.body["normalized"]["3"]["queue_frequency"].get<double>() == Approx(30.4).margin(0.05));
  const auto s = service().handle("GET", "/api/simulation", "");
  CHECK(s.body["bypassed"] == true);
  CHECK(s.body["cells"].size() == 27);
  CHECK(s.body["expected"]["2"]["queueFrequency"].get<double>() == Approx(0.06125).epsilon(1e-12));
  const auto c = service().handle("GET", "/api/config", "");
  CHECK(c.body["config"]["criteria"]["weights"]["cost_total"] == 0.25);
}

TEST_CASE("rescoring with the case-study weights matches the library", "[service]") {
  const auto r = service().handle("POST", "/api/score", json{{"weights", case_weights()}}.dump());
  REQUIRE(r.status == 200);
  CHECK(r.body["method"] == "dynamicMcda");
  const auto& lib = artifact().ranking(Method::dynamicMcda);
  for (int o : {1, 2, 3}) CHECK(r.body["totals"][std::to_string(o)].get<double>() == lib.totals.at(o));
  CHECK(r.body["totals"]["1"].get<double>() == Approx(65.0).margin(0.01));
  CHECK(r.body["totals"]["2"].get<double>() == Approx(75.0).margin(0.01));
  CHECK(r.body["totals"]["3"].get<double>() == Approx(54.64).margin(0.01));
}

TEST_CASE("all weight on cost projects the cost column", "[service]") {
  json w = case_weights();
  for (auto& [k, v] : w.items()) v = k == "cost_total" ? 1.0 : 0.0;
  const auto r = service().handle("POST", "/api/score", json{{"weights", w}}.dump());
  CHECK(r.body["totals"]["1"] == 100.0);
  CHECK(r.body["totals"]["2"] == 0.0);
  CHECK(r.body["totals"]["3"] == 0.0);
  CHECK(r.body["order"][0] == 1);
}

TEST_CASE("score methods", "[service]") {
  const auto cba = service().handle("POST", "/api/score", R"({"method": "cba"})");
  CHECK(cba.body["order"][0] == 1);
  CHECK(cba.body["totals"]["1"].get<double>() == Approx(515257.9).margin(1.0));
  const auto st = service().handle("POST", "/api/score", R"({"method": "staticMcda"})");
  CHECK(st.body["totals"]["1"].get<double>() == Approx(92.86).margin(0.01));
  CHECK(service().handle("POST", "/api/score", R"({"method": "vote"})").status == 400);
}

TEST_CASE("sensitivity endpoint", "[service]") {
  const auto r = service().handle("POST", "/api/sensitivity", R"({"variant": "selectedCriteria", "iterations": 1000})");
  REQUIRE(r.status == 200);
  CHECK(r.body["topRankFrequency"]["2"] == 100.0);
  CHECK(r.body["iterations"] == 1000);
  const auto again = service().handle("POST", "/api/sensitivity", R"({"variant": "allCriteria", "seed": 3})");
  CHECK(again.body == service().handle("POST", "/api/sensitivity", R"({"variant": "allCriteria", "seed": 3})").body);
  const auto weighted = service().handle(
      "POST", "/api/sensitivity",
      json{{"variant", "criteriaAndWeights"}, {"iterations", 200}, {"weights", case_weights()}}.dump());
  CHECK(weighted.status == 200);
}

TEST_CASE("matrix override endpoint", "[service]") {
  const auto base = service().handle("POST", "/api/score/matrix", "{}");
  CHECK(base.body["totals"] == service().handle("POST", "/api/score", "{}").body["totals"]);
  // Option 3 loses its queues: it now ties option 2 on every customer criterion.
  const auto r = service().handle("POST", "/api/score/matrix", R"({"overrides": [
      {"option": 3, "criterion": "queue_frequency", "value": 0.06125},
      {"option": 3, "criterion": "passive_queue_frequency", "value": 0.011875},
      {"option": 3, "criterion": "dissatisfaction", "value": 0.033125},
      {"option": 1, "criterion": "job_opportunities", "value": true}]})");
  REQUIRE(r.status == 200);
  CHECK(r.body["normalized"]["3"]["queue_frequency"] == 100.0);
  CHECK(r.body["normalized"]["1"]["job_opportunities"] == 100.0);
  CHECK(r.body["totals"]["3"].get<double>() == Approx(75.0).margin(1e-9));
  CHECK(r.body["totals"]["1"].get<double>() == Approx(70.0).margin(1e-9));
  CHECK(r.body["order"] == json::array({2, 3, 1}));
}

TEST_CASE("validation errors are 400 with the field", "[service][errors]") {
  auto field = [](const std::string& path, const std::string& body) {
    const auto r = service().handle("POST", path, body);
    CHECK(r.status == 400);
    CHECK(r.body["error"]["message"].is_string());
    return r.body["error"]["field"].get<std::string>();
  };
  CHECK(field("/api/score", "{") == "body");
  CHECK(field("/api/score", "[1]") == "body");
  CHECK(field("/api/score", R"({"weights": {"cost_total": 0.5}})") == "weights");
  CHECK(field("/api/score", R"({"weights": {"cost_total": "a"}})") == "weights.cost_total");
  CHECK(field("/api/score", R"({"weights": [1]})") == "weights");
  CHECK(field("/api/score", R"({"colour": 1})") == "colour");
  CHECK(field("/api/score/matrix", R"({"overrides": {}})") == "overrides");
  CHECK(field("/api/score/matrix", R"({"overrides": [{"option": 9, "criterion": "cost_total", "value": 1}]})") ==
        "overrides[0]");
  CHECK(field("/api/score/matrix", R"({"overrides": [{"option": 1, "criterion": "cost_total", "value": "x"}]})") ==
        "overrides[0].value");
  CHECK(field("/api/score/matrix",
              R"({"overrides": [{"option": 1, "criterion": "road_safety", "value": 0.5}]})")
            .starts_with("matrix"));
  CHECK(field("/api/sensitivity", R"({"amplitude": 2})") == "sensitivity.amplitude");
  CHECK(field("/api/sensitivity", R"({"iterations": 2000000})") == "iterations");
  CHECK(field("/api/sensitivity", R"({"variant": "sideways"})") == "variant");
  CHECK(field("/api/sensitivity", R"({"frozenCriteria": ["beauty"]})") == "criteria");
  CHECK(field("/api/sensitivity", R"({"rounds": 1})") == "rounds");
}

TEST_CASE("unknown routes are 404", "[service][errors]") {
  CHECK(service().handle("GET", "/api/nothing", "").status == 404);
  CHECK(service().handle("DELETE", "/api/artifact", "").status == 404);
  CHECK(service().handle("GET", "/api/score", "").status == 404);
}

TEST_CASE("unscored artifacts are refused", "[service][errors]") {
  PipelineConfig c;
  c.bypassSimulationTable = std::string(DYNMCDA_DATA_DIR) + "/case_study_simulation_table.csv";
  CHECK_THROWS_AS(Service(run_pipeline(c, {.score = false, .sensitivity = false})), ValidationError);
}

TEST_CASE("concurrent requests and snapshot swaps", "[service]") {
  Service s(artifact());
  const auto expected = s.handle("POST", "/api/score", "{}").body.dump();
  std::vector<std::thread> workers;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&] {
      for (int i = 0; i < 200; ++i)
        if (s.handle("POST", "/api/score", "{}").body.dump() != expected) ++mismatches;
    });
  for (int i = 0; i < 20; ++i) s.set_artifact(artifact());
  for (auto& w : workers) w.join();
  CHECK(mismatches == 0);
}

TEST_CASE("HTTP round trip", "[service][http]") {
  Service s(artifact());
  const int port = s.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server([&] { s.listen_after_bind(); });
  s.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  const auto hash = artifact().provenance.configHash;

  auto get = client.Get("/api/artifact");
  REQUIRE(get);
  CHECK(get->status == 200);
  CHECK(get->get_header_value("Content-Type") == "application/json");
  CHECK(json::parse(get->body)["provenance"]["configHash"] == hash);
  for (const char* path : {"/api/config", "/api/simulation"}) {
    auto r = client.Get(path);
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body)["provenance"]["configHash"] == hash);
  }

  auto post = client.Post("/api/score", json{{"weights", case_weights()}}.dump(), "application/json");
  REQUIRE(post);
  const auto body = json::parse(post->body);
  CHECK(body["totals"]["2"].get<double>() == artifact().ranking(Method::dynamicMcda).totals.at(2));
  CHECK(body["provenance"]["configHash"] == hash);

  auto sens = client.Post("/api/sensitivity", R"({"variant": "selectedCriteria", "iterations": 300})",
                          "application/json");
  REQUIRE(sens);
  CHECK(json::parse(sens->body)["topRankFrequency"]["2"] == 100.0);

  auto matrix = client.Post("/api/score/matrix", "{}", "application/json");
  REQUIRE(matrix);
  CHECK(matrix->status == 200);

  auto bad = client.Post("/api/score", R"({"weights": {"cost_total": 0.5}})", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["error"]["field"] == "weights");
  CHECK(json::parse(bad->body)["provenance"]["configHash"] == hash);

  auto missing = client.Get("/api/missing");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body)["provenance"]["configHash"] == hash);

  s.stop();
  server.join();
  CHECK_FALSE(s.is_running());
}
