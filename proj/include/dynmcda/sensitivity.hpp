#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "des/random.hpp"
#include "error.hpp"
#include "mcda.hpp"
#include "parallel.hpp"
#include "ranking.hpp"

namespace dynmcda {

enum class SensitivityVariant { selectedCriteria, allCriteria, criteriaAndWeights };

inline std::string_view to_string(SensitivityVariant v) {
  switch (v) {
    case SensitivityVariant::selectedCriteria: return "selectedCriteria";
    case SensitivityVariant::allCriteria: return "allCriteria";
    case SensitivityVariant::criteriaAndWeights: return "criteriaAndWeights";
  }
  return "?";
}

inline SensitivityVariant variant_from_string(std::string_view s) {
  if (s == "selectedCriteria") return SensitivityVariant::selectedCriteria;
  if (s == "allCriteria") return SensitivityVariant::allCriteria;
  if (s == "criteriaAndWeights") return SensitivityVariant::criteriaAndWeights;
  throw ValidationError("sensitivity.variant", "unknown variant '" + std::string(s) + "'");
}

namespace defaults {

inline std::set<std::string> frozen_criteria() {
  return {std::string(criteria::kTrafficProfit), std::string(criteria::kLocalProfits),
          std::string(criteria::kRoadSafety)};
}

}  // namespace defaults

struct PerturbationConfig {
  SensitivityVariant variant = SensitivityVariant::allCriteria;
  double amplitude = 0.1;
  std::size_t iterations = 10000;
  // Only consulted for the selectedCriteria variant.
  std::set<std::string> frozenCriteria = defaults::frozen_criteria();
  double clampFloor = 0.0;
  std::uint64_t seed = 20240101;
  // Re-apply min-max per criterion after perturbing so every column spans
  // 0..100 again before weighting.
  bool rescale = true;
  std::size_t threads = 0;

  void validate() const {
    if (!(amplitude >= 0.0 && amplitude < 1.0))
      throw ValidationError("sensitivity.amplitude", "must satisfy 0 <= amplitude < 1");
    if (iterations < 1) throw ValidationError("sensitivity.iterations", "must be >= 1");
  }

  bool perturbs_weights() const noexcept { return variant == SensitivityVariant::criteriaAndWeights; }

  bool is_frozen(const std::string& id) const {
    return variant == SensitivityVariant::selectedCriteria && frozenCriteria.count(id) != 0;
  }
};

struct SensitivityReport {
  SensitivityVariant variant = SensitivityVariant::allCriteria;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::map<int, double> topRankFrequency;                // option id -> percent
  std::map<int, std::vector<double>> rankDistribution;   // option id -> percent at rank 1..n
};

namespace detail {
enum SensitivityStream : std::uint64_t { scoreDraws = 1, weightDraws = 2 };
}

// Multiplies each non-frozen cell by U(1-a, 1+a), flooring at clampFloor.
inline ScoreMatrix perturb_scores(const ScoreMatrix& s, const PerturbationConfig& cfg, des::RandomStream& stream) {
  ScoreMatrix out = s;
  if (cfg.amplitude == 0.0) return out;
  std::vector<bool> frozen;
  frozen.reserve(s.criteria.size());
  for (const auto& id : s.criteria) frozen.push_back(cfg.is_frozen(id));
  for (auto& row : out.scores) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (frozen[j]) continue;
      const double alpha = stream.uniform(1.0 - cfg.amplitude, 1.0 + cfg.amplitude);
      row[j] = std::max(cfg.clampFloor, row[j] * alpha);
    }
  }
  return out;
}

inline WeightVector perturb_weights(const WeightVector& w, double amplitude, des::RandomStream& stream) {
  if (amplitude == 0.0) return w;
  std::map<std::string, double> scaled;
  double sum = 0.0;
  for (const auto& [id, v] : w.values()) {
    const double x = v * stream.uniform(1.0 - amplitude, 1.0 + amplitude);
    scaled[id] = x;
    sum += x;
  }
  for (auto& [id, v] : scaled) v /= sum;
  return WeightVector(std::move(scaled));
}

// Min-max per column with orientation "higher is better"; perturbed scores
// are already oriented.
inline void rescale_columns(ScoreMatrix& s) {
  for (std::size_t j = 0; j < s.criteria.size(); ++j) {
    const auto col = s.column(j);
    const auto scored = min_max_scores(col, Direction::higherBetter);
    for (std::size_t i = 0; i < col.size(); ++i) s.scores[i][j] = scored[i];
  }
}

// Ranking after one perturbation draw; iteration i uses streams derived from
// (seed, i) so any partition of iterations gives the same report.
inline std::vector<int> perturbed_order(const ScoreMatrix& s, const WeightVector& w, const PerturbationConfig& cfg,
                                        std::size_t iteration) {
  des::RandomStream scoreStream(des::derive_seed(cfg.seed, iteration), detail::scoreDraws);
  ScoreMatrix p = perturb_scores(s, cfg, scoreStream);
  if (cfg.rescale && cfg.amplitude != 0.0) rescale_columns(p);
  if (cfg.perturbs_weights()) {
    des::RandomStream weightStream(des::derive_seed(cfg.seed, iteration), detail::weightDraws);
    const WeightVector pw = perturb_weights(w, cfg.amplitude, weightStream);
    return order_by_total(totals_of(p, aligned_weights(p, pw)));
  }
  return order_by_total(totals_of(p, aligned_weights(p, w)));
}

inline SensitivityReport run_analysis(const ScoreMatrix& s, const WeightVector& w, const PerturbationConfig& cfg) {
  cfg.validate();
  if (s.options.empty()) throw ValidationError("scores", "no options");
  if (s.options.size() > 255) throw ValidationError("scores", "at most 255 options are supported");
  (void)aligned_weights(s, w);
  const std::size_t n = s.options.size();
  std::map<int, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position[s.options[i]] = i;

  // rankOf[iteration * n + optionIndex] = rank (0-based)
  std::vector<std::uint8_t> rankOf(cfg.iterations * n);
  constexpr std::size_t kChunk = 256;
  const std::size_t chunks = (cfg.iterations + kChunk - 1) / kChunk;
  parallel_for(chunks, cfg.threads, [&](std::size_t c) {
    const std::size_t end = std::min(cfg.iterations, (c + 1) * kChunk);
    for (std::size_t it = c * kChunk; it < end; ++it) {
      const auto order = perturbed_order(s, w, cfg, it);
      for (std::size_t r = 0; r < order.size(); ++r)
        rankOf[it * n + position.at(order[r])] = static_cast<std::uint8_t>(r);
    }
  });

  SensitivityReport rep;
  rep.variant = cfg.variant;
  rep.iterations = cfg.iterations;
  rep.seed = cfg.seed;
  std::vector<std::vector<std::size_t>> counts(n, std::vector<std::size_t>(n, 0));
  for (std::size_t it = 0; it < cfg.iterations; ++it)
    for (std::size_t i = 0; i < n; ++i) ++counts[i][rankOf[it * n + i]];
  const double scale = 100.0 / static_cast<double>(cfg.iterations);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dist(n);
    for (std::size_t r = 0; r < n; ++r) dist[r] = static_cast<double>(counts[i][r]) * scale;
    rep.topRankFrequency[s.options[i]] = dist[0];
    rep.rankDistribution[s.options[i]] = std::move(dist);
  }
  return rep;
}

}  // namespace dynmcda
