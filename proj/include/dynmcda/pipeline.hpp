#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "cost_benefit.hpp"
#include "error.hpp"
#include "mcda.hpp"
#include "port_sim.hpp"
#include "ranking.hpp"
#include "report.hpp"
#include "scenario.hpp"
#include "sensitivity.hpp"

namespace dynmcda {

struct PipelineStages {
  bool score = true;
  bool sensitivity = true;
};

struct RunArtifact {
  Provenance provenance;
  PipelineConfig config;
  ScenarioSet scenarios;
  port::SimulationTable simulation;
  bool simulationBypassed = false;
  std::map<int, port::SimStats> expected;  // option id -> scenario-weighted statistics
  std::vector<CostBreakdown> costs;
  CriteriaMatrix raw;
  ScoreMatrix normalized;
  std::vector<std::vector<double>> weighted;  // normalized score x weight
  std::vector<double> weights;                // aligned to normalized.criteria
  std::vector<RankingOutcome> rankings;       // cba, staticMcda, dynamicMcda
  std::vector<SensitivityReport> sensitivity;
  std::vector<std::string> warnings;

  const RankingOutcome& ranking(Method m) const {
    for (const auto& r : rankings)
      if (r.method == m) return r;
    throw ValidationError("method", "no ranking for " + std::string(to_string(m)));
  }
};

// Hash of the resolved configuration plus, in bypass mode, the injected
// table's bytes (the path itself does not matter).
inline std::string config_hash(const PipelineConfig& c, const std::string& bypassTableText = {}) {
  json j = config_to_json(c);
  j.erase("bypassSimulationTable");
  std::uint64_t h = fnv1a(j.dump());
  if (!c.bypassSimulationTable.empty()) h = fnv1a(bypassTableText, fnv1a("\x1f" "table", h));
  return hex64(h);
}

namespace detail {

template <class F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError&) {
    throw;
  } catch (const RuntimeError&) {
    throw;
  } catch (const std::exception& e) {
    throw RuntimeError(stage, e.what());
  }
}

}  // namespace detail

inline std::map<int, port::SimStats> expected_by_option(const port::SimulationTable& t,
                                                        const std::vector<OptionSpec>& options,
                                                        const ScenarioSet& set) {
  std::map<int, port::SimStats> out;
  for (const auto& o : options) out[o.id] = port::expected_from_table(t, o.id, set);
  return out;
}

// Stages in flowchart order: options, criteria, simulation, weights, score,
// examine.
inline RunArtifact run_pipeline(const PipelineConfig& config, PipelineStages stages = {}) {
  RunArtifact a;
  a.config = config;
  detail::run_stage("config", [&] { config.validate(); });
  std::string tableText;
  if (!config.bypassSimulationTable.empty())
    tableText = read_text_file(config.bypassSimulationTable, "bypassSimulationTable");
  a.provenance.configHash = config_hash(config, tableText);
  a.provenance.seed = config.masterSeed;
  a.scenarios = build_scenario_set(config.vtg, config.ltp);

  detail::run_stage("simulation", [&] {
    if (!config.bypassSimulationTable.empty()) {
      a.simulationBypassed = true;
      a.simulation = parse_simulation_csv(tableText, a.scenarios);
      for (const auto& o : config.options)
        for (const auto& s : a.scenarios) (void)a.simulation.cell(o.id, s.id);
    } else {
      a.simulation = port::simulate_table(config.options, a.scenarios, config.simulation, config.masterSeed);
    }
    for (const auto& c : a.simulation.cells)
      if (c.stats.diagnostics.unstable)
        a.warnings.push_back("option " + std::to_string(c.optionId) + ", scenario " +
                             std::to_string(c.scenario.id) + ": pre-queue did not drain (max length " +
                             std::to_string(c.stats.diagnostics.maxPreQueueLength) + ")");
    a.expected = expected_by_option(a.simulation, config.options, a.scenarios);
  });
  if (!stages.score) return a;

  const WeightVector weights = config.weights();
  detail::run_stage("score", [&] {
    for (const auto& o : config.options) a.costs.push_back(expected_breakdown(o, config.vtg, config.financial));
    a.raw = assemble_matrix(a.costs, a.expected, config.binaries, config.criteria);
    a.normalized = normalize(a.raw, config.normalization);
    a.weights = aligned_weights(a.normalized, weights);
    a.weighted = a.normalized.scores;
    for (auto& row : a.weighted)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] *= a.weights[j];
    a.rankings.push_back(cba_rank(a.costs));
    a.rankings.push_back(static_mcda(a.raw, weights, config.normalization));
    a.rankings.push_back(weighted_totals(a.normalized, weights, Method::dynamicMcda));
  });
  if (!stages.sensitivity) return a;

  detail::run_stage("sensitivity", [&] {
    for (auto v : config.sensitivityVariants) {
      PerturbationConfig p = config.sensitivity;
      p.variant = v;
      a.sensitivity.push_back(run_analysis(a.normalized, weights, p));
    }
  });
  return a;
}

inline json artifact_to_json(const RunArtifact& a) {
  json j;
  j["provenance"] = a.provenance.to_json();
  j["simulationBypassed"] = a.simulationBypassed;
  j["simulation"] = simulation_to_json(a.simulation);
  json expected = json::object();
  for (const auto& [id, s] : a.expected) expected[std::to_string(id)] = stats_to_json(s);
  j["expected"] = expected;
  json costs = json::array();
  for (const auto& c : a.costs) costs.push_back(breakdown_to_json(c));
  j["costs"] = costs;
  if (!a.raw.criteria.empty()) {
    std::vector<std::string> ids;
    for (const auto& c : a.raw.criteria) ids.push_back(c.id);
    j["criteria"] = ids;
    json weights = json::object();
    for (std::size_t k = 0; k < ids.size(); ++k) weights[ids[k]] = a.weights[k];
    j["weights"] = weights;
    j["raw"] = scores_to_json(a.raw.options, ids, a.raw.values);
    j["normalized"] = scores_to_json(a.normalized.options, ids, a.normalized.scores);
    j["weighted"] = scores_to_json(a.normalized.options, ids, a.weighted);
  }
  json rankings = json::object();
  for (const auto& r : a.rankings) rankings[std::string(to_string(r.method))] = ranking_to_json(r);
  j["rankings"] = rankings;
  json sens = json::array();
  for (const auto& r : a.sensitivity) sens.push_back(sensitivity_to_json(r));
  j["sensitivity"] = sens;
  j["warnings"] = a.warnings;
  return j;
}

// Writes every table present in the artifact into `dir`; returns the file
// names written.
inline std::vector<std::string> write_artifact(const RunArtifact& a, const std::string& dir) {
  return detail::run_stage("report", [&] {
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& name, const std::string& content) {
      write_text_file((std::filesystem::path(dir) / name).string(), content);
      written.push_back(name);
    };
    const auto& p = a.provenance;
    put("simulation.csv", simulation_csv(a.simulation, p));
    if (!a.costs.empty()) {
      std::vector<std::string> ids;
      for (const auto& c : a.raw.criteria) ids.push_back(c.id);
      put("costs.csv", costs_csv(a.costs, p));
      put("raw_scores.csv", matrix_csv(a.raw.options, ids, a.raw.values, p));
      put("normalized_scores.csv", matrix_csv(a.normalized.options, ids, a.normalized.scores, p));
      put("weighted_scores.csv", matrix_csv(a.normalized.options, ids, a.weighted, p, &a.weights, true));
      put("rankings.csv", rankings_csv(a.rankings, p));
    }
    for (const auto& r : a.sensitivity)
      put("sensitivity_" + std::string(to_string(r.variant)) + ".csv", sensitivity_csv(r, p));
    put("artifact.json", artifact_to_json(a).dump(2) + "\n");
    return written;
  });
}

}  // namespace dynmcda
