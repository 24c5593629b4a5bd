// Library walk-through: score the case study from the reference simulation
// table, then ask a what-if question about the weights.

#include <cstdio>
#include <string>

#include "dynmcda/dynmcda.hpp"

int main(int argc, char** argv) {
  using namespace dynmcda;

  PipelineConfig config = parse_config("");
  config.bypassSimulationTable = argc > 1 ? argv[1] : std::string(DYNMCDA_DATA_DIR) + "/case_study_simulation_table.csv";
  config.sensitivity.iterations = 2000;

  const RunArtifact run = run_pipeline(config);

  for (const auto& r : run.rankings) {
    std::printf("%-12s best option %d:", std::string(to_string(r.method)).c_str(), r.best());
    for (const auto& [id, total] : r.totals) std::printf("  %d=%.2f", id, total);
    std::printf("\n");
  }

  // Move 0.15 of weight from the customer criteria onto cost.
  auto weights = config.weights().values();
  weights["cost_total"] += 0.15;
  weights["queue_frequency"] -= 0.05;
  weights["passive_queue_frequency"] -= 0.05;
  weights["dissatisfaction"] -= 0.05;
  const auto whatIf = weighted_totals(run.normalized, WeightVector(weights));
  std::printf("cost-heavy weights: best option %d\n", whatIf.best());

  for (const auto& s : run.sensitivity) {
    std::printf("%-20s", std::string(to_string(s.variant)).c_str());
    for (const auto& [id, f] : s.topRankFrequency) std::printf("  %d=%.1f%%", id, f);
    std::printf("\n");
  }
  return 0;
}
