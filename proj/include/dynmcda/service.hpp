#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <utility>

#include <httplib.h>

#include "config.hpp"
#include "error.hpp"
#include "mcda.hpp"
#include "pipeline.hpp"
#include "report.hpp"
#include "sensitivity.hpp"

namespace dynmcda {

// JSON-over-HTTP front end for a completed run. Requests only re-score the
// cached tables; the simulation never runs per request.
class Service {
 public:
  struct Reply {
    int status = 200;
    json body;
  };

  static constexpr std::size_t kMaxIterations = 1'000'000;

  explicit Service(RunArtifact artifact) { set_artifact(std::move(artifact)); }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Replaces the snapshot; in-flight requests finish on the old one.
  void set_artifact(RunArtifact artifact) {
    if (artifact.normalized.options.empty())
      throw ValidationError("artifact", "the service needs a scored artifact");
    auto snap = std::make_shared<Snapshot>();
    snap->weights = artifact.config.weights();
    snap->artifactJson = artifact_to_json(artifact);
    snap->configJson = config_to_json(artifact.config);
    snap->artifact = std::move(artifact);
    std::lock_guard lock(mutex_);
    snapshot_ = std::move(snap);
  }

  std::string provenance_hash() const { return snapshot()->artifact.provenance.configHash; }

  // Routing without sockets; the HTTP layer below is a thin wrapper.
  Reply handle(const std::string& method, const std::string& path, const std::string& body) const {
    const auto snap = snapshot();
    Reply r;
    try {
      if (method == "GET" && path == "/api/artifact") r.body = snap->artifactJson;
      else if (method == "GET" && path == "/api/config") r.body = {{"config", snap->configJson}};
      else if (method == "GET" && path == "/api/simulation") r.body = simulation_body(*snap);
      else if (method == "POST" && path == "/api/score") r.body = score(*snap, parse_body(body));
      else if (method == "POST" && path == "/api/score/matrix") r.body = score_matrix(*snap, parse_body(body));
      else if (method == "POST" && path == "/api/sensitivity") r.body = sensitivity(*snap, parse_body(body));
      else {
        r.status = 404;
        r.body = error_body("path", "no route for " + method + " " + path);
      }
    } catch (const ValidationError& e) {
      r.status = 400;
      r.body = error_body(e.field(), e.what());
    } catch (const std::exception& e) {
      r.status = 500;
      r.body = error_body("", e.what());
    }
    r.body["provenance"] = snap->artifact.provenance.to_json();
    return r;
  }

  // Serves `dir` under "/" next to the API (used for a browser client).
  bool mount_static(const std::string& dir) { return server_.set_mount_point("/", dir); }

  int bind_to_any_port(const std::string& host) {
    install_routes();
    return server_.bind_to_any_port(host);
  }
  bool listen_after_bind() { return server_.listen_after_bind(); }

  bool listen(const std::string& host, int port) {
    install_routes();
    return server_.listen(host, port);
  }

  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }
  void wait_until_ready() const { server_.wait_until_ready(); }

 private:
  struct Snapshot {
    RunArtifact artifact;
    WeightVector weights;
    json artifactJson;
    json configJson;
  };

  std::shared_ptr<const Snapshot> snapshot() const {
    std::lock_guard lock(mutex_);
    return snapshot_;
  }

  static json error_body(const std::string& field, const std::string& message) {
    return {{"error", {{"field", field}, {"message", message}}}};
  }

  static json parse_body(const std::string& body) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
    try {
      json j = json::parse(body);
      if (!j.is_object()) throw ValidationError("body", "expected a JSON object");
      return j;
    } catch (const json::parse_error& e) {
      throw ValidationError("body", std::string("invalid JSON: ") + e.what());
    }
  }

  static WeightVector weights_from(const json& body, const Snapshot& snap) {
    const auto it = body.find("weights");
    if (it == body.end()) return snap.weights;
    if (!it->is_object()) throw ValidationError("weights", "expected an object of criterion id -> weight");
    std::map<std::string, double> w;
    for (const auto& [id, v] : it->items()) {
      if (!v.is_number()) throw ValidationError("weights." + id, "expected a number");
      w[id] = v.get<double>();
    }
    return WeightVector(std::move(w), "weights");
  }

  static void check_keys(const json& body, std::initializer_list<const char*> allowed) {
    for (const auto& [k, _] : body.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) throw ValidationError(k, "unknown key");
    }
  }

  static json simulation_body(const Snapshot& snap) {
    json expected = json::object();
    for (const auto& [id, s] : snap.artifact.expected) expected[std::to_string(id)] = stats_to_json(s);
    return {{"bypassed", snap.artifact.simulationBypassed},
            {"cells", simulation_to_json(snap.artifact.simulation)},
            {"expected", expected}};
  }

  static json score(const Snapshot& snap, const json& body) {
    check_keys(body, {"weights", "method"});
    Method method = Method::dynamicMcda;
    if (const auto it = body.find("method"); it != body.end()) {
      if (!it->is_string()) throw ValidationError("method", "expected a string");
      method = method_from_string(it->get<std::string>());
    }
    const auto& a = snap.artifact;
    switch (method) {
      case Method::cba: return ranking_to_json(a.ranking(Method::cba));
      case Method::staticMcda:
        return ranking_to_json(static_mcda(a.raw, weights_from(body, snap), a.config.normalization));
      case Method::dynamicMcda: break;
    }
    return ranking_to_json(weighted_totals(a.normalized, weights_from(body, snap), Method::dynamicMcda));
  }

  static json score_matrix(const Snapshot& snap, const json& body) {
    check_keys(body, {"weights", "overrides"});
    CriteriaMatrix m = snap.artifact.raw;
    if (const auto it = body.find("overrides"); it != body.end()) {
      if (!it->is_array()) throw ValidationError("overrides", "expected an array of {option, criterion, value}");
      for (std::size_t k = 0; k < it->size(); ++k) {
        const auto& o = (*it)[k];
        const auto path = "overrides[" + std::to_string(k) + "]";
        if (!o.is_object() || !o.contains("option") || !o.contains("criterion") || !o.contains("value"))
          throw ValidationError(path, "expected {option, criterion, value}");
        if (!o["option"].is_number_integer() || !o["criterion"].is_string())
          throw ValidationError(path, "option must be an integer and criterion a string");
        std::size_t i = 0, j = 0;
        try {
          i = m.option_index(o["option"].get<int>());
          j = m.criterion_index(o["criterion"].get<std::string>());
        } catch (const ValidationError& e) {
          throw ValidationError(path, e.what());
        }
        const auto& v = o["value"];
        if (v.is_boolean()) m.values[i][j] = v.get<bool>() ? 1.0 : 0.0;
        else if (v.is_number()) m.values[i][j] = v.get<double>();
        else throw ValidationError(path + ".value", "expected a number or boolean");
      }
    }
    m.validate();
    const ScoreMatrix s = normalize(m, snap.artifact.config.normalization);
    json j = ranking_to_json(weighted_totals(s, weights_from(body, snap), Method::dynamicMcda));
    j["normalized"] = scores_to_json(s.options, s.criteria, s.scores);
    return j;
  }

  static json sensitivity(const Snapshot& snap, const json& body) {
    PerturbationConfig p = snap.artifact.config.sensitivity;
    json fields = body;
    fields.erase("weights");
    detail::ObjectReader r(fields, "");
    detail::read_sensitivity_fields(r, p);
    r.finish();
    p.validate();
    if (p.iterations > kMaxIterations)
      throw ValidationError("iterations", "at most " + std::to_string(kMaxIterations) + " per request");
    for (const auto& id : p.frozenCriteria)
      (void)snap.artifact.raw.criterion_index(id);
    return sensitivity_to_json(run_analysis(snap.artifact.normalized, weights_from(body, snap), p));
  }

  void install_routes() {
    if (routesInstalled_) return;
    routesInstalled_ = true;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      const Reply r = handle(req.method, req.path, req.body);
      res.status = r.status;
      res.set_content(r.body.dump(), "application/json");
    };
    server_.Get("/api/.*", forward);
    server_.Post("/api/.*", forward);
  }

  mutable std::mutex mutex_;
  std::shared_ptr<const Snapshot> snapshot_;
  httplib::Server server_;
  bool routesInstalled_ = false;
};

}  // namespace dynmcda
