#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mshap/config.hpp"
#include "mshap/scoring.hpp"
#include "mshap/simulation.hpp"
#include "mshap/table.hpp"

namespace mshap {

// Everything a subcommand produces: named output files and a human-readable
// report for stdout. The CLI only writes these out.
struct CommandOutput {
  std::vector<std::pair<std::string, std::string>> files;
  std::string report;
};

// Tabular serializers shared by the CLI and anyone checking its output.
std::string score_csv(const ScoreBreakdown& score);
std::string simulation_csv(std::span<const ScenarioResult> results);
std::string method_summary_csv(std::span<const ScenarioResult> results);
std::string bench_csv(std::span<const BenchRecord> records);

struct FeatureImportance {
  std::string feature;
  double mean_abs_value = 0.0;
};

// Mean |attribution| per feature, largest first; ties ordered by name.
std::vector<FeatureImportance> feature_importance(const ShapTable& table);
std::string importance_csv(std::span<const FeatureImportance> items);
// One record per (row, feature): covariate value next to its attribution.
std::string observations_csv(const ShapTable& attributions, const ValueTable& covariates);

CommandOutput cmd_combine(const RunConfig& config);
CommandOutput cmd_score(const RunConfig& config);
CommandOutput cmd_simulate(const RunConfig& config);
CommandOutput cmd_bench(const RunConfig& config);
CommandOutput cmd_summary_data(const RunConfig& config);
CommandOutput run_command(const RunConfig& config);

inline constexpr const char* kResolvedConfigName = "resolved_config.json";

// Writes every output file plus the resolved config into config.out_dir.
void write_outputs(const RunConfig& config, const CommandOutput& output);

}  // namespace mshap
