#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "cost_benefit.hpp"
#include "error.hpp"
#include "mcda.hpp"
#include "port_sim.hpp"
#include "ranking.hpp"
#include "scenario.hpp"
#include "sensitivity.hpp"

namespace dynmcda {

#ifndef DYNMCDA_VERSION
#define DYNMCDA_VERSION "1.0.0"
#endif

inline constexpr std::string_view kToolVersion = DYNMCDA_VERSION;

struct Provenance {
  std::string configHash;
  std::uint64_t seed = 0;
  std::string version{kToolVersion};

  std::string csv_comment() const {
    return "# config_hash=" + configHash + " seed=" + std::to_string(seed) + " version=" + version + "\n";
  }

  json to_json() const { return {{"configHash", configHash}, {"seed", seed}, {"version", version}}; }
};

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr std::string_view kSimulationCsvHeader =
    "option,scenario,vtg,ltp,probability,queue_pct,passive_pct,dissat_pct,queue_sd,passive_sd,dissat_sd,n";

// The n column is the replication count behind each cell.
inline std::string simulation_csv(const port::SimulationTable& t, const Provenance& p) {
  std::string out = p.csv_comment();
  out += kSimulationCsvHeader;
  out += '\n';
  for (const auto& c : t.cells) {
    const auto& s = c.stats;
    out += std::to_string(c.optionId) + "," + std::to_string(c.scenario.id) + "," + fmt(c.scenario.vtg) + "," +
           fmt(c.scenario.ltp) + "," + fmt(c.scenario.probability) + "," + fmt(s.queueFrequency) + "," +
           fmt(s.passiveQueueFrequency) + "," + fmt(s.dissatisfactionMean) + "," + fmt(s.queueSd) + "," +
           fmt(s.passiveQueueSd) + "," + fmt(s.dissatisfactionSd) + "," + std::to_string(s.replications) + "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ValidationError(where, "not a number: '" + s + "'");
  }
}

}  // namespace detail

// Reads a table written by simulation_csv (or hand-made in the same layout).
// Lines starting with '#' are comments. Every row must name a scenario of
// `set` with matching vtg, ltp and probability.
inline port::SimulationTable parse_simulation_csv(const std::string& text, const ScenarioSet& set,
                                                  const std::string& field = "bypassSimulationTable") {
  std::istringstream in(text);
  std::string line;
  bool haveHeader = false;
  int lineNo = 0;
  port::SimulationTable table;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const std::string where = field + ":" + std::to_string(lineNo);
    if (!haveHeader) {
      if (line != kSimulationCsvHeader) throw ValidationError(where, "expected header '" +
                                                                        std::string(kSimulationCsvHeader) + "'");
      haveHeader = true;
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 12) throw ValidationError(where, "expected 12 columns, got " + std::to_string(cells.size()));
    std::vector<double> v;
    for (const auto& c : cells) v.push_back(detail::parse_number(c, where));
    const int optionId = static_cast<int>(v[0]);
    const int scenarioId = static_cast<int>(v[1]);
    if (optionId != v[0] || scenarioId != v[1] || v[11] != std::floor(v[11]) || v[11] < 1)
      throw ValidationError(where, "option, scenario and n must be positive integers");
    const Scenario* sc = nullptr;
    try {
      sc = &set.by_id(scenarioId);
    } catch (const ValidationError&) {
      throw ValidationError(where, "unknown scenario " + std::to_string(scenarioId));
    }
    if (std::abs(sc->vtg - v[2]) > 1e-9 || std::abs(sc->ltp - v[3]) > 1e-9 || std::abs(sc->probability - v[4]) > 1e-9)
      throw ValidationError(where, "vtg/ltp/probability disagree with scenario " + std::to_string(scenarioId));
    for (int k = 5; k <= 10; ++k)
      if (v[static_cast<std::size_t>(k)] < 0.0) throw ValidationError(where, "statistics must be >= 0");
    for (int k = 5; k <= 7; ++k)
      if (v[static_cast<std::size_t>(k)] > 100.0) throw ValidationError(where, "percentages must be <= 100");
    port::SimStats s;
    s.queueFrequency = v[5];
    s.passiveQueueFrequency = v[6];
    s.dissatisfactionMean = v[7];
    s.queueSd = v[8];
    s.passiveQueueSd = v[9];
    s.dissatisfactionSd = v[10];
    s.replications = static_cast<int>(v[11]);
    for (const auto& existing : table.cells)
      if (existing.optionId == optionId && existing.scenario.id == scenarioId)
        throw ValidationError(where, "duplicate cell");
    table.cells.push_back({optionId, *sc, s});
  }
  if (!haveHeader) throw ValidationError(field, "empty table");
  return table;
}

inline std::string read_text_file(const std::string& path, const std::string& field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(field, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("report", "cannot write '" + path + "'");
  out << content;
  if (!out) throw RuntimeError("report", "write failed for '" + path + "'");
}

// Score tables in the case-study layout: one row per criterion, one column
// per option.
inline std::string matrix_csv(const std::vector<int>& options, const std::vector<std::string>& criteriaIds,
                              const std::vector<std::vector<double>>& values, const Provenance& p,
                              const std::vector<double>* weights = nullptr, bool withTotal = false) {
  std::string out = p.csv_comment();
  out += "criterion";
  if (weights) out += ",weight";
  for (int o : options) out += ",option_" + std::to_string(o);
  out += '\n';
  for (std::size_t j = 0; j < criteriaIds.size(); ++j) {
    out += criteriaIds[j];
    if (weights) out += "," + fmt((*weights)[j]);
    for (std::size_t i = 0; i < options.size(); ++i) out += "," + fmt(values[i][j]);
    out += '\n';
  }
  if (withTotal) {
    out += "total";
    if (weights) out += ",";
    for (std::size_t i = 0; i < options.size(); ++i) {
      double t = 0.0;
      for (double x : values[i]) t += x;
      out += "," + fmt(t);
    }
    out += '\n';
  }
  return out;
}

inline std::string rankings_csv(const std::vector<RankingOutcome>& rankings, const Provenance& p) {
  std::string out = p.csv_comment() + "method,rank,option,total\n";
  for (const auto& r : rankings)
    for (std::size_t k = 0; k < r.order.size(); ++k)
      out += std::string(to_string(r.method)) + "," + std::to_string(k + 1) + "," + std::to_string(r.order[k]) +
             "," + fmt(r.totals.at(r.order[k])) + "\n";
  return out;
}

inline std::string costs_csv(const std::vector<CostBreakdown>& b, const Provenance& p) {
  std::string out = p.csv_comment() + "option,environmental,facility,safety,cost_total,traffic_profit,net_benefit\n";
  for (const auto& c : b)
    out += std::to_string(c.optionId) + "," + fmt(c.environmental) + "," + fmt(c.facility) + "," + fmt(c.safety) +
           "," + fmt(c.costTotal) + "," + fmt(c.trafficProfit) + "," + fmt(c.netBenefit) + "\n";
  return out;
}

inline std::string sensitivity_csv(const SensitivityReport& r, const Provenance& p) {
  std::string out = p.csv_comment() + "option,top_rank_pct";
  const std::size_t n = r.rankDistribution.empty() ? 0 : r.rankDistribution.begin()->second.size();
  for (std::size_t k = 1; k <= n; ++k) out += ",rank_" + std::to_string(k) + "_pct";
  out += '\n';
  for (const auto& [opt, top] : r.topRankFrequency) {
    out += std::to_string(opt) + "," + fmt(top);
    for (double x : r.rankDistribution.at(opt)) out += "," + fmt(x);
    out += '\n';
  }
  return out;
}

inline json stats_to_json(const port::SimStats& s) {
  return {{"queueFrequency", s.queueFrequency},
          {"passiveQueueFrequency", s.passiveQueueFrequency},
          {"dissatisfactionMean", s.dissatisfactionMean},
          {"queueSd", s.queueSd},
          {"passiveQueueSd", s.passiveQueueSd},
          {"dissatisfactionSd", s.dissatisfactionSd},
          {"replications", s.replications},
          {"customersProcessed", s.customersProcessed},
          {"maxPreQueueLength", s.diagnostics.maxPreQueueLength},
          {"unstable", s.diagnostics.unstable}};
}

inline json simulation_to_json(const port::SimulationTable& t) {
  json cells = json::array();
  for (const auto& c : t.cells) {
    json row = {{"option", c.optionId},
                {"scenario", c.scenario.id},
                {"vtg", c.scenario.vtg},
                {"ltp", c.scenario.ltp},
                {"probability", c.scenario.probability}};
    row.update(stats_to_json(c.stats));
    cells.push_back(row);
  }
  return cells;
}

inline json ranking_to_json(const RankingOutcome& r) {
  json totals = json::object();
  for (const auto& [id, t] : r.totals) totals[std::to_string(id)] = t;
  return {{"method", to_string(r.method)}, {"totals", totals}, {"order", r.order}};
}

inline json scores_to_json(const std::vector<int>& options, const std::vector<std::string>& criteriaIds,
                           const std::vector<std::vector<double>>& values) {
  json rows = json::object();
  for (std::size_t i = 0; i < options.size(); ++i) {
    json row = json::object();
    for (std::size_t j = 0; j < criteriaIds.size(); ++j) row[criteriaIds[j]] = values[i][j];
    rows[std::to_string(options[i])] = row;
  }
  return rows;
}

inline json sensitivity_to_json(const SensitivityReport& r) {
  json top = json::object();
  json dist = json::object();
  for (const auto& [id, f] : r.topRankFrequency) top[std::to_string(id)] = f;
  for (const auto& [id, d] : r.rankDistribution) dist[std::to_string(id)] = d;
  return {{"variant", to_string(r.variant)},
          {"iterations", r.iterations},
          {"seed", r.seed},
          {"topRankFrequency", top},
          {"rankDistribution", dist}};
}

inline json breakdown_to_json(const CostBreakdown& c) {
  return {{"option", c.optionId},         {"environmental", c.environmental}, {"facility", c.facility},
          {"safety", c.safety},           {"costTotal", c.costTotal},         {"trafficProfit", c.trafficProfit},
          {"netBenefit", c.netBenefit}};
}

}  // namespace dynmcda
