// dynmcda: simulate, score, sensitivity, pipeline and serve subcommands.
// Exit codes: 0 success, 1 invalid input, 2 runtime failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dynmcda/dynmcda.hpp"
#include "dynmcda/service.hpp"

namespace {

using namespace dynmcda;

struct CommonArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<int> days;
  std::optional<int> warmupDays;
  std::optional<std::size_t> threads;
  std::string bypassTable;
  std::string out;
  bool fullScale = false;
};

void add_common(CLI::App* sub, CommonArgs& a) {
  sub->add_option("--config", a.config, "JSON configuration file (defaults reproduce the case study)");
  sub->add_option("--seed", a.seed, "master seed");
  sub->add_option("--replications", a.replications, "replications per (option, scenario) cell")->check(CLI::PositiveNumber);
  sub->add_option("--days", a.days, "simulated days per replication")->check(CLI::PositiveNumber);
  sub->add_option("--warmup-days", a.warmupDays, "days discarded before statistics are kept");
  sub->add_option("--threads", a.threads, "worker threads (0: all cores)");
  sub->add_option("--bypass-simulation", a.bypassTable, "use this simulation table CSV instead of simulating");
  sub->add_option("--out", a.out, "output directory for CSV/JSON tables");
  sub->add_flag("--full-scale", a.fullScale, "365 days, 20 warm-up days, 10,000 replications");
}

PipelineConfig resolve_config(const CommonArgs& a) {
  PipelineConfig c = a.config.empty() ? parse_config("") : load_config(a.config);
  if (a.fullScale) {
    const auto ps = port::SimConfig::full_scale();
    c.simulation.runDays = ps.runDays;
    c.simulation.warmupDays = ps.warmupDays;
    c.simulation.replications = ps.replications;
  }
  if (a.seed) c.masterSeed = *a.seed;
  if (a.replications) c.simulation.replications = *a.replications;
  if (a.days) c.simulation.runDays = *a.days;
  if (a.warmupDays) c.simulation.warmupDays = *a.warmupDays;
  if (a.threads) c.simulation.threads = c.sensitivity.threads = *a.threads;
  if (!a.bypassTable.empty()) c.bypassSimulationTable = a.bypassTable;
  if (!a.out.empty()) c.outputDirectory = a.out;
  c.validate();
  return c;
}

void print_simulation(const RunArtifact& a) {
  std::printf("simulation (%s), config %s\n", a.simulationBypassed ? "injected table" : "simulated",
              a.provenance.configHash.c_str());
  std::printf("%6s %8s %5s %6s %8s %8s %8s %8s\n", "option", "scenario", "vtg", "ltp", "prob", "queue%", "passive%",
              "dissat%");
  for (const auto& c : a.simulation.cells)
    std::printf("%6d %8d %5.2f %6.2f %8.4f %8.3f %8.3f %8.3f\n", c.optionId, c.scenario.id, c.scenario.vtg,
                c.scenario.ltp, c.scenario.probability, c.stats.queueFrequency, c.stats.passiveQueueFrequency,
                c.stats.dissatisfactionMean);
  for (const auto& [id, s] : a.expected)
    std::printf("expected option %d: queue %.4f  passive %.4f  dissatisfaction %.4f\n", id, s.queueFrequency,
                s.passiveQueueFrequency, s.dissatisfactionMean);
  for (const auto& w : a.warnings) std::printf("warning: %s\n", w.c_str());
}

void print_scores(const RunArtifact& a) {
  std::printf("\ncosts and benefits\n");
  for (const auto& c : a.costs)
    std::printf("option %d: environmental %.3f facility %.3f safety %.3f total %.3f profit %.3f net %.3f\n",
                c.optionId, c.environmental, c.facility, c.safety, c.costTotal, c.trafficProfit, c.netBenefit);
  std::printf("\nnormalized scores\n%-26s", "criterion");
  for (int o : a.normalized.options) std::printf(" %9s%d", "option ", o);
  std::printf("\n");
  for (std::size_t j = 0; j < a.normalized.criteria.size(); ++j) {
    std::printf("%-26s", a.normalized.criteria[j].c_str());
    for (const auto& row : a.normalized.scores) std::printf(" %10.3f", row[j]);
    std::printf("\n");
  }
  std::printf("\nrankings\n");
  for (const auto& r : a.rankings) {
    std::printf("%-12s", std::string(to_string(r.method)).c_str());
    for (int o : r.order) std::printf("  option %d (%.4f)", o, r.totals.at(o));
    std::printf("\n");
  }
}

void print_sensitivity(const RunArtifact& a) {
  std::printf("\nsensitivity (top-rank frequency %%)\n");
  for (const auto& r : a.sensitivity) {
    std::printf("%-20s", std::string(to_string(r.variant)).c_str());
    for (const auto& [o, f] : r.topRankFrequency) std::printf("  option %d %6.2f", o, f);
    std::printf("  (%zu iterations, seed %llu)\n", r.iterations, static_cast<unsigned long long>(r.seed));
  }
}

void write_outputs(const RunArtifact& a) {
  if (a.config.outputDirectory.empty()) return;
  const auto files = write_artifact(a, a.config.outputDirectory);
  std::printf("\nwrote %zu files to %s\n", files.size(), a.config.outputDirectory.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation-guided multi-criteria decision analysis for the weighbridge expansion case study"};
  app.require_subcommand(1);
  CommonArgs args;
  auto* simulate = app.add_subcommand("simulate", "run the traffic simulation and report per-scenario statistics");
  auto* score = app.add_subcommand("score", "simulate (or inject a table), then score and rank with CBA and MCDA");
  auto* sens = app.add_subcommand("sensitivity", "score, then run the Monte-Carlo ranking sensitivity analysis");
  auto* pipeline = app.add_subcommand("pipeline", "every stage, writing all tables");
  auto* serve = app.add_subcommand("serve", "run the pipeline, then serve the JSON API");
  for (auto* s : {simulate, score, sens, pipeline, serve}) add_common(s, args);

  std::string variant;
  std::optional<std::size_t> iterations;
  sens->add_option("--variant", variant, "selectedCriteria, allCriteria or criteriaAndWeights (default: all three)");
  sens->add_option("--iterations", iterations, "perturbation draws per variant")->check(CLI::PositiveNumber);

  std::string host = "127.0.0.1";
  int port = 8080;
  std::string staticDir;
  serve->add_option("--host", host, "listen address");
  serve->add_option("--port", port, "listen port")->check(CLI::Range(1, 65535));
  serve->add_option("--static", staticDir, "directory served at / next to the API");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    PipelineConfig config = resolve_config(args);
    if (!variant.empty()) config.sensitivityVariants = {variant_from_string(variant)};
    if (iterations) config.sensitivity.iterations = *iterations;

    PipelineStages stages;
    stages.score = !simulate->parsed();
    stages.sensitivity = sens->parsed() || pipeline->parsed() || serve->parsed();
    const RunArtifact artifact = run_pipeline(config, stages);

    print_simulation(artifact);
    if (stages.score) print_scores(artifact);
    if (stages.sensitivity) print_sensitivity(artifact);
    write_outputs(artifact);

    if (serve->parsed()) {
      Service service(artifact);
      if (!staticDir.empty() && !service.mount_static(staticDir))
        throw ValidationError("--static", "not a directory: " + staticDir);
      std::printf("\nserving on http://%s:%d (config %s)\n", host.c_str(), port,
                  artifact.provenance.configHash.c_str());
      std::fflush(stdout);
      if (!service.listen(host, port)) throw RuntimeError("serve", "cannot listen on " + host + ":" + std::to_string(port));
    }
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
