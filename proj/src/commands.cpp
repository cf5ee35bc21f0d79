#include "mshap/commands.hpp"

#include <algorithm>

namespace mshap {
namespace {

std::string breakdown_fields(const ScoreBreakdown& s) {
  return format_double(s.score) + ',' + format_double(s.direction_score) + ',' +
         format_double(s.relative_value_score) + ',' + format_double(s.rank_score) + ',' +
         format_double(s.pct_same_sign) + ',' + format_double(s.pct_same_rank);
}

constexpr const char* kBreakdownHeader =
    "score,direction_score,relative_value_score,rank_score,pct_same_sign,pct_same_rank";

// Error text goes in the last CSV column, so keep it free of delimiters.
std::string csv_safe(std::string text) {
  std::replace_if(text.begin(), text.end(), [](char c) { return c == ',' || c == '\n' || c == '\r' || c == '"'; }, ';');
  return text;
}

void require_path(const std::string& path, const char* what) {
  if (path.empty()) throw ConfigError(std::string("missing input: ") + what);
}

std::string format_report(const ScoreBreakdown& s) {
  return "score                 " + format_double(s.score) + "\n" +
         "direction_score       " + format_double(s.direction_score) + "\n" +
         "relative_value_score  " + format_double(s.relative_value_score) + "\n" +
         "rank_score            " + format_double(s.rank_score) + "\n" +
         "pct_same_sign         " + format_double(s.pct_same_sign) + "\n" +
         "pct_same_rank         " + format_double(s.pct_same_rank) + "\n";
}

}  // namespace

std::string score_csv(const ScoreBreakdown& score) {
  return std::string(kBreakdownHeader) + "\n" + breakdown_fields(score) + "\n";
}

std::string simulation_csv(std::span<const ScenarioResult> results) {
  std::string out =
      "scenario,y1,y2,theta1,theta2,n,p,background_size,seed,reference,method," +
      std::string(kBreakdownHeader) + ",fallback_rows,resampled_rows,error\n";
  for (std::size_t k = 0; k < results.size(); ++k) {
    const ScenarioResult& r = results[k];
    const ScenarioSpec& s = r.spec;
    for (const MethodScore& m : r.methods) {
      out += std::to_string(k + 1) + ',' + std::string(to_string(s.y1)) + ',' +
             std::string(to_string(s.y2)) + ',' + format_double(s.theta1) + ',' +
             format_double(s.theta2) + ',' + std::to_string(s.n) + ',' +
             std::to_string(s.covariates.features()) + ',' + std::to_string(s.background_size) +
             ',' + std::to_string(s.seed) + ',' + (r.sampled_reference ? "sampling" : "exact") +
             ',' + std::string(to_string(m.method)) + ',';
      if (r.error) {
        out += ",,,,,,,," + std::to_string(r.resampled_rows) + ',' + csv_safe(*r.error);
      } else {
        out += breakdown_fields(m.score) + ',' + std::to_string(m.fallback_rows) + ',' +
               std::to_string(r.resampled_rows) + ',';
      }
      out += '\n';
    }
  }
  return out;
}

std::string method_summary_csv(std::span<const ScenarioResult> results) {
  const auto means = method_means(results);
  std::string out = "method," + std::string(kBreakdownHeader) + "\n";
  for (std::size_t k = 0; k < 4; ++k) {
    out += std::string(to_string(kAllAlphaMethods[k])) + ',' + breakdown_fields(means[k]) + '\n';
  }
  return out;
}

std::string bench_csv(std::span<const BenchRecord> records) {
  std::string out = "p,n,method,wall_seconds,per_observation_seconds,error\n";
  for (const BenchRecord& r : records) {
    out += std::to_string(r.p) + ',' + std::to_string(r.n) + ',' + std::string(to_string(r.method)) +
           ',';
    if (r.error) {
      out += ",," + csv_safe(*r.error);
    } else {
      out += format_double(r.wall_seconds) + ',' + format_double(r.per_observation_seconds) + ',';
    }
    out += '\n';
  }
  return out;
}

std::vector<FeatureImportance> feature_importance(const ShapTable& table) {
  std::vector<FeatureImportance> out;
  const double rows = static_cast<double>(std::max<Index>(table.values.rows(), 1));
  for (Index j = 0; j < table.values.cols(); ++j) {
    out.push_back({table.feature_names[static_cast<std::size_t>(j)],
                   compensated_sum(table.values.col(j).cwiseAbs()) / rows});
  }
  std::sort(out.begin(), out.end(), [](const FeatureImportance& a, const FeatureImportance& b) {
    if (a.mean_abs_value != b.mean_abs_value) return a.mean_abs_value > b.mean_abs_value;
    return a.feature < b.feature;
  });
  return out;
}

std::string importance_csv(std::span<const FeatureImportance> items) {
  std::string out = "feature,mean_abs_value\n";
  for (const FeatureImportance& f : items) out += f.feature + ',' + format_double(f.mean_abs_value) + '\n';
  return out;
}

std::string observations_csv(const ShapTable& attributions, const ValueTable& covariates) {
  if (attributions.values.rows() != covariates.values.rows()) {
    throw DimensionError("attribution table has " + std::to_string(attributions.values.rows()) +
                         " rows, covariate table has " + std::to_string(covariates.values.rows()));
  }
  if (attributions.feature_names != covariates.columns) {
    const std::size_t p = std::min(attributions.feature_names.size(), covariates.columns.size());
    std::size_t j = 0;
    while (j < p && attributions.feature_names[j] == covariates.columns[j]) ++j;
    throw DimensionError("covariate columns do not match attribution features at column " +
                         std::to_string(j + 1));
  }
  std::string out = "row,feature,covariate,value\n";
  for (Index i = 0; i < attributions.values.rows(); ++i) {
    for (Index j = 0; j < attributions.values.cols(); ++j) {
      out += std::to_string(i + 1) + ',' + attributions.feature_names[static_cast<std::size_t>(j)] +
             ',' + format_double(covariates.values(i, j)) + ',' +
             format_double(attributions.values(i, j)) + '\n';
    }
  }
  return out;
}

CommandOutput cmd_combine(const RunConfig& config) {
  require_path(config.combine.f_shap, "--f-shap");
  require_path(config.combine.g_shap, "--g-shap");
  const ShapTable f = read_table(config.combine.f_shap);
  const ShapTable g = read_table(config.combine.g_shap);
  double mu_h = 0.0;
  if (config.combine.mu_h) {
    mu_h = *config.combine.mu_h;
  } else {
    if (!f.predictions || !g.predictions) {
      throw InvalidInputError("--mu-h auto needs prediction columns in both input tables");
    }
    mu_h = mean_product_baseline(*f.predictions, *g.predictions);
  }
  const MshapExplanation z =
      combine(to_explanation(f), to_explanation(g), mu_h, config.combine.method);
  const ShapTable out = to_table(z);
  CommandOutput result;
  result.files.emplace_back("mshap.csv", table_csv(out));
  result.files.emplace_back("mshap.meta.json", table_metadata(out));
  result.report = "rows " + std::to_string(z.rows()) + ", features " + std::to_string(z.features()) +
                  ", mu_h " + format_double(z.mu_h) + ", alpha " + format_double(z.alpha) +
                  ", method " + std::string(to_string(z.method)) + ", advisories " +
                  std::to_string(z.fallback_rows.size()) + "\n";
  return result;
}

CommandOutput cmd_score(const RunConfig& config) {
  require_path(config.score.candidate, "--candidate");
  require_path(config.score.reference, "--reference");
  const ShapTable candidate = read_table(config.score.candidate);
  const ShapTable reference = read_table(config.score.reference);
  const ScoreBreakdown s = score_matrices(candidate.values, reference.values,
                                          ScoreParams{config.score.theta1, config.score.theta2});
  CommandOutput result;
  result.files.emplace_back("score.csv", score_csv(s));
  result.report = format_report(s);
  return result;
}

CommandOutput cmd_simulate(const RunConfig& config) {
  const std::vector<ScenarioSpec> cells = make_grid(config.grid());
  if (cells.empty()) throw ConfigError("simulation grid is empty");
  for (const ScenarioSpec& cell : cells) {
    try {
      cell.validate();
    } catch (const InvalidInputError& e) {
      throw ConfigError(std::string("invalid scenario: ") + e.what());
    }
  }
  const std::vector<ScenarioResult> results = run_grid(cells, config.threads);
  CommandOutput result;
  result.files.emplace_back("simulation.csv", simulation_csv(results));
  result.files.emplace_back("method_summary.csv", method_summary_csv(results));
  const auto means = method_means(results);
  std::size_t failed = 0;
  for (const ScenarioResult& r : results) failed += r.error ? 1 : 0;
  result.report = std::to_string(cells.size()) + " scenarios, " + std::to_string(failed) +
                  " failed\nmethod    score\n";
  for (std::size_t k = 0; k < 4; ++k) {
    std::string name(to_string(kAllAlphaMethods[k]));
    name.resize(10, ' ');
    result.report += name + format_double(means[k].score) + '\n';
  }
  return result;
}

CommandOutput cmd_bench(const RunConfig& config) {
  const std::vector<BenchRecord> records = bench_scaling(config.bench_config());
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  meta["machine"] = machine_descriptor();
  meta["threads"] = 1;
  meta["repetitions"] = std::max(config.bench.repetitions, 5);
  meta["background_size"] = config.bench.background_size;
  CommandOutput result;
  result.files.emplace_back("bench.csv", bench_csv(records));
  result.files.emplace_back("bench.meta.json", meta.dump(2) + "\n");
  for (const BenchRecord& r : records) {
    result.report += "p=" + std::to_string(r.p) + " n=" + std::to_string(r.n) + " " +
                     std::string(to_string(r.method)) + " " +
                     (r.error ? "error: " + *r.error : format_double(r.per_observation_seconds) + " s/obs") +
                     '\n';
  }
  return result;
}

CommandOutput cmd_summary_data(const RunConfig& config) {
  require_path(config.summary.mshap, "--mshap");
  require_path(config.summary.covariates, "--covariates");
  const ShapTable table = read_table(config.summary.mshap);
  ValueTable covariates;
  try {
    covariates = parse_values_csv(read_file(config.summary.covariates));
  } catch (const ParseError& e) {
    throw ParseError(config.summary.covariates + ": " + e.what());
  }
  const auto importance = feature_importance(table);
  CommandOutput result;
  result.files.emplace_back("observations.csv", observations_csv(table, covariates));
  result.files.emplace_back("importance.csv", importance_csv(importance));
  for (const FeatureImportance& f : importance) {
    result.report += f.feature + ' ' + format_double(f.mean_abs_value) + '\n';
  }
  return result;
}

CommandOutput run_command(const RunConfig& config) {
  if (config.command == "combine") return cmd_combine(config);
  if (config.command == "score") return cmd_score(config);
  if (config.command == "simulate") return cmd_simulate(config);
  if (config.command == "bench") return cmd_bench(config);
  if (config.command == "summary-data") return cmd_summary_data(config);
  throw ConfigError("unknown command '" + config.command + "'");
}

void write_outputs(const RunConfig& config, const CommandOutput& output) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  for (const auto& [name, contents] : output.files) write_file_atomic(dir / name, contents);
  write_file_atomic(dir / kResolvedConfigName, to_json(config).dump(2) + "\n");
}

}  // namespace mshap
