#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cost_benefit.hpp"
#include "error.hpp"
#include "port_sim.hpp"
#include "ranking.hpp"

namespace dynmcda {

enum class CriterionKind { monetary, binaryBenefit, percentCost };
enum class Direction { lowerBetter, higherBetter };

inline std::string_view to_string(CriterionKind k) {
  switch (k) {
    case CriterionKind::monetary: return "monetary";
    case CriterionKind::binaryBenefit: return "binaryBenefit";
    case CriterionKind::percentCost: return "percentCost";
  }
  return "?";
}

inline std::string_view to_string(Direction d) { return d == Direction::lowerBetter ? "lowerBetter" : "higherBetter"; }

struct CriterionDef {
  std::string id;
  std::string label;
  CriterionKind kind = CriterionKind::monetary;
  Direction direction = Direction::higherBetter;
  double weight = 0.0;
  bool simulationDerived = false;
};

namespace criteria {
inline constexpr std::string_view kCostTotal = "cost_total";
inline constexpr std::string_view kTrafficProfit = "traffic_profit";
inline constexpr std::string_view kLocalProfits = "local_profits";
inline constexpr std::string_view kJobOpportunities = "job_opportunities";
inline constexpr std::string_view kRoadSafety = "road_safety";
inline constexpr std::string_view kQueueFrequency = "queue_frequency";
inline constexpr std::string_view kPassiveQueueFrequency = "passive_queue_frequency";
inline constexpr std::string_view kDissatisfaction = "dissatisfaction";
}  // namespace criteria

namespace defaults {

// Cost and profit 0.25 each, customer criteria 0.1 each, local-community
// criteria 0.05 each.
inline std::vector<CriterionDef> criteria_catalog() {
  using enum CriterionKind;
  using enum Direction;
  return {
      {std::string(criteria::kCostTotal), "Cost Total", monetary, lowerBetter, 0.25, false},
      {std::string(criteria::kTrafficProfit), "Additional traffic profit", monetary, higherBetter, 0.25, false},
      {std::string(criteria::kLocalProfits), "Local profits", binaryBenefit, higherBetter, 0.05, false},
      {std::string(criteria::kJobOpportunities), "Job Opportunities", binaryBenefit, higherBetter, 0.05, false},
      {std::string(criteria::kRoadSafety), "Road safety", binaryBenefit, higherBetter, 0.10, false},
      {std::string(criteria::kQueueFrequency), "Queue frequency", percentCost, lowerBetter, 0.10, true},
      {std::string(criteria::kPassiveQueueFrequency), "Passive queue frequency", percentCost, lowerBetter, 0.10, true},
      {std::string(criteria::kDissatisfaction), "Customer dissatisfaction", percentCost, lowerBetter, 0.10, true},
  };
}

}  // namespace defaults

class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(std::map<std::string, double> weights, const std::string& field = "criteria.weights")
      : weights_(std::move(weights)) {
    double sum = 0.0;
    for (const auto& [id, w] : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError(field + "." + id, "weight must be non-negative");
      sum += w;
    }
    if (weights_.empty()) throw ValidationError(field, "no weights given");
    if (std::abs(sum - 1.0) > 1e-9)
      throw ValidationError(field, "weights sum to " + std::to_string(sum) + ", expected 1");
  }

  static WeightVector from_catalog(std::span<const CriterionDef> catalog) {
    std::map<std::string, double> w;
    for (const auto& c : catalog) w[c.id] = c.weight;
    return WeightVector(std::move(w));
  }

  const std::map<std::string, double>& values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool contains(const std::string& id) const { return weights_.count(id) != 0; }

  double at(const std::string& id) const {
    auto it = weights_.find(id);
    if (it == weights_.end()) throw ValidationError("criteria.weights", "no weight for criterion '" + id + "'");
    return it->second;
  }

 private:
  std::map<std::string, double> weights_;
};

// Raw option x criterion scores. Binary criteria hold 1 (yes) or 0 (no).
struct CriteriaMatrix {
  std::vector<int> options;
  std::vector<CriterionDef> criteria;
  std::vector<std::vector<double>> values;  // [option][criterion]

  std::size_t option_index(int id) const {
    for (std::size_t i = 0; i < options.size(); ++i)
      if (options[i] == id) return i;
    throw ValidationError("options", "unknown option id " + std::to_string(id));
  }

  std::size_t criterion_index(std::string_view id) const {
    for (std::size_t j = 0; j < criteria.size(); ++j)
      if (criteria[j].id == id) return j;
    throw ValidationError("criteria", "unknown criterion '" + std::string(id) + "'");
  }

  double at(int optionId, std::string_view criterionId) const {
    return values[option_index(optionId)][criterion_index(criterionId)];
  }

  void validate() const {
    if (options.empty()) throw ValidationError("matrix.options", "no options");
    if (criteria.empty()) throw ValidationError("matrix.criteria", "no criteria");
    if (values.size() != options.size()) throw ValidationError("matrix.values", "row count differs from options");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i].size() != criteria.size())
        throw ValidationError("matrix.values", "option " + std::to_string(options[i]) + " is missing criteria");
      for (std::size_t j = 0; j < criteria.size(); ++j) {
        const double v = values[i][j];
        if (!std::isfinite(v))
          throw ValidationError("matrix.values", "non-finite value for option " + std::to_string(options[i]) +
                                                     ", criterion " + criteria[j].id);
        if (criteria[j].kind == CriterionKind::binaryBenefit && v != 0.0 && v != 1.0)
          throw ValidationError("matrix.values", "binary criterion " + criteria[j].id + " must be yes or no");
      }
    }
  }
};

// Common-scale scores, 0 (worst) .. 100 (best).
struct ScoreMatrix {
  std::vector<int> options;
  std::vector<std::string> criteria;
  std::vector<std::vector<double>> scores;  // [option][criterion]

  double at(int optionId, std::string_view criterionId) const {
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i] != optionId) continue;
      for (std::size_t j = 0; j < criteria.size(); ++j)
        if (criteria[j] == criterionId) return scores[i][j];
    }
    throw ValidationError("scores", "no score for option " + std::to_string(optionId) + ", criterion " +
                                        std::string(criterionId));
  }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> c;
    c.reserve(scores.size());
    for (const auto& row : scores) c.push_back(row[j]);
    return c;
  }
};

struct BinaryCriteria {
  // criterion id -> option id -> yes/no
  std::map<std::string, std::map<int, bool>> values;
};

namespace defaults {

inline BinaryCriteria binary_criteria() {
  BinaryCriteria b;
  b.values[std::string(criteria::kLocalProfits)] = {{1, true}, {2, true}, {3, true}};
  b.values[std::string(criteria::kJobOpportunities)] = {{1, false}, {2, true}, {3, true}};
  b.values[std::string(criteria::kRoadSafety)] = {{1, true}, {2, true}, {3, true}};
  return b;
}

}  // namespace defaults

// Builds the raw matrix in catalog order from the cost breakdowns, the
// simulated customer statistics and the yes/no judgements.
inline CriteriaMatrix assemble_matrix(std::span<const CostBreakdown> breakdowns,
                                      const std::map<int, port::SimStats>& simStats, const BinaryCriteria& binaries,
                                      std::vector<CriterionDef> catalog = defaults::criteria_catalog()) {
  if (breakdowns.empty()) throw ValidationError("breakdowns", "no options");
  if (simStats.empty()) throw ValidationError("simStats", "no simulation statistics");
  CriteriaMatrix m;
  m.criteria = std::move(catalog);
  for (const auto& b : breakdowns) {
    m.options.push_back(b.optionId);
    const auto sim = simStats.find(b.optionId);
    std::vector<double> row;
    row.reserve(m.criteria.size());
    for (const auto& c : m.criteria) {
      const std::string where = "option " + std::to_string(b.optionId) + ", criterion " + c.id;
      if (c.id == criteria::kCostTotal) {
        row.push_back(b.costTotal);
      } else if (c.id == criteria::kTrafficProfit) {
        row.push_back(b.trafficProfit);
      } else if (c.simulationDerived) {
        if (sim == simStats.end()) throw ValidationError("simStats", "missing cell: " + where);
        if (c.id == criteria::kQueueFrequency) row.push_back(sim->second.queueFrequency);
        else if (c.id == criteria::kPassiveQueueFrequency) row.push_back(sim->second.passiveQueueFrequency);
        else if (c.id == criteria::kDissatisfaction) row.push_back(sim->second.dissatisfactionMean);
        else throw ValidationError("criteria", "no simulated statistic for " + c.id);
      } else if (c.kind == CriterionKind::binaryBenefit) {
        const auto crit = binaries.values.find(c.id);
        if (crit == binaries.values.end()) throw ValidationError("binaryCriteria", "missing cell: " + where);
        const auto cell = crit->second.find(b.optionId);
        if (cell == crit->second.end()) throw ValidationError("binaryCriteria", "missing cell: " + where);
        row.push_back(cell->second ? 1.0 : 0.0);
      } else {
        throw ValidationError("criteria", "no source for " + where);
      }
    }
    m.values.push_back(std::move(row));
  }
  m.validate();
  return m;
}

struct NormalizeOptions {
  // Score monetary criteria 100 for the best option(s), 0 otherwise,
  // instead of min-max.
  bool monetaryIndicator = false;
};

// Oriented min-max onto 0..100; a column with no spread scores 100 everywhere.
inline std::vector<double> min_max_scores(std::span<const double> column, Direction direction) {
  const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
  const double best = direction == Direction::lowerBetter ? *lo : *hi;
  const double worst = direction == Direction::lowerBetter ? *hi : *lo;
  std::vector<double> out;
  out.reserve(column.size());
  const double scale = std::max({std::abs(*lo), std::abs(*hi), 1.0});
  if (*hi - *lo <= 1e-12 * scale) {
    out.assign(column.size(), 100.0);
    return out;
  }
  for (double x : column) out.push_back(100.0 * ((worst - x) / (worst - best)));
  return out;
}

inline ScoreMatrix normalize(const CriteriaMatrix& m, NormalizeOptions opts = {}) {
  m.validate();
  ScoreMatrix s;
  s.options = m.options;
  for (const auto& c : m.criteria) s.criteria.push_back(c.id);
  s.scores.assign(m.options.size(), std::vector<double>(m.criteria.size(), 0.0));
  for (std::size_t j = 0; j < m.criteria.size(); ++j) {
    const auto& c = m.criteria[j];
    std::vector<double> col;
    for (const auto& row : m.values) col.push_back(row[j]);
    std::vector<double> scored;
    if (c.kind == CriterionKind::binaryBenefit) {
      for (double v : col) scored.push_back(v != 0.0 ? 100.0 : 0.0);
    } else if (c.kind == CriterionKind::monetary && opts.monetaryIndicator) {
      const auto [lo, hi] = std::minmax_element(col.begin(), col.end());
      const double best = c.direction == Direction::lowerBetter ? *lo : *hi;
      for (double v : col) scored.push_back(v == best ? 100.0 : 0.0);
    } else {
      scored = min_max_scores(col, c.direction);
    }
    for (std::size_t i = 0; i < col.size(); ++i) s.scores[i][j] = scored[i];
  }
  return s;
}

// Weights aligned to the matrix's criterion order. The weight ids must match
// the matrix criteria exactly.
inline std::vector<double> aligned_weights(const ScoreMatrix& s, const WeightVector& w) {
  if (w.size() != s.criteria.size())
    throw ValidationError("criteria.weights", "expected " + std::to_string(s.criteria.size()) + " weights, got " +
                                                  std::to_string(w.size()));
  std::vector<double> out;
  out.reserve(s.criteria.size());
  for (const auto& id : s.criteria) {
    if (!w.contains(id)) throw ValidationError("criteria.weights", "no weight for criterion '" + id + "'");
    out.push_back(w.at(id));
  }
  return out;
}

inline std::map<int, double> totals_of(const ScoreMatrix& s, std::span<const double> weights) {
  std::map<int, double> totals;
  for (std::size_t i = 0; i < s.options.size(); ++i) {
    double t = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) t += s.scores[i][j] * weights[j];
    totals[s.options[i]] = t;
  }
  return totals;
}

inline RankingOutcome weighted_totals(const ScoreMatrix& s, const WeightVector& w,
                                      Method method = Method::dynamicMcda) {
  const auto weights = aligned_weights(s, w);
  return make_ranking(method, totals_of(s, weights));
}

inline RankingOutcome dynamic_mcda(const CriteriaMatrix& m, const WeightVector& w, NormalizeOptions opts = {}) {
  return weighted_totals(normalize(m, opts), w, Method::dynamicMcda);
}

// MCDA without the simulation-derived criteria; the surviving weights are
// rescaled to sum to one.
inline RankingOutcome static_mcda(const CriteriaMatrix& m, const WeightVector& w, NormalizeOptions opts = {}) {
  m.validate();
  CriteriaMatrix reduced;
  reduced.options = m.options;
  reduced.values.assign(m.options.size(), {});
  std::map<std::string, double> kept;
  double keptSum = 0.0;
  for (std::size_t j = 0; j < m.criteria.size(); ++j) {
    const auto& c = m.criteria[j];
    if (c.simulationDerived) continue;
    reduced.criteria.push_back(c);
    for (std::size_t i = 0; i < m.options.size(); ++i) reduced.values[i].push_back(m.values[i][j]);
    kept[c.id] = w.at(c.id);
    keptSum += kept[c.id];
  }
  if (reduced.criteria.empty()) throw ValidationError("criteria", "every criterion is simulation-derived");
  if (!(keptSum > 0.0)) throw ValidationError("criteria.weights", "static criteria carry zero weight");
  // Catches weights for unknown criteria.
  (void)aligned_weights(normalize(m, opts), w);
  for (auto& [id, v] : kept) v /= keptSum;
  // Renormalised weights are only equal to one within rounding.
  double sum = 0.0;
  for (const auto& [id, v] : kept) sum += v;
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("criteria.weights", "renormalisation failed");
  return weighted_totals(normalize(reduced, opts), WeightVector(std::move(kept)), Method::staticMcda);
}

}  // namespace dynmcda
