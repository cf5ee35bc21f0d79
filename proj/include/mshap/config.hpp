#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mshap/simulation.hpp"

namespace mshap {

// Fully resolved inputs of one CLI run. Every field has a default, a JSON
// key of the same name, and (where it makes sense) a command-line flag.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 20220101;
  int threads = 1;
  int enum_limit = 16;
  std::string out_dir = "out";

  struct Combine {
    std::string f_shap;
    std::string g_shap;
    std::optional<double> mu_h;  // nullopt means "auto"
    AlphaMethod method = AlphaMethod::AbsoluteWeights;
  } combine;

  struct Score {
    std::string candidate;
    std::string reference;
    double theta1 = 1.5;
    double theta2 = 1.0;
  } score;

  struct Simulate {
    std::vector<ResponseId> y1 = {kFirstPartResponses.begin(), kFirstPartResponses.end()};
    std::vector<ResponseId> y2 = {kSecondPartResponses.begin(), kSecondPartResponses.end()};
    std::vector<double> theta1 = {1.5, 10.5, 20.5};
    std::vector<double> theta2 = {1.0, 21.0, 46.0};
    Index n = 100;
    Index background_size = 100;
    std::vector<std::pair<double, double>> covariates =
        CovariateSpec::three_feature_default().bounds;
    std::int64_t sampling_permutations = 1000;
  } simulate;

  struct Bench {
    std::vector<Index> p_values = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<Index> n_values = {50};
    Index background_size = 100;
    int repetitions = 5;
    std::int64_t sampling_permutations = 32;
    double min_batch_seconds = 2e-3;
  } bench;

  struct Summary {
    std::string mshap;
    std::string covariates;
  } summary;

  GridSpec grid() const;
  BenchConfig bench_config() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);

// Overlays `json` onto `base`. Unknown keys and mistyped values raise
// ConfigError.
RunConfig merge_config(const nlohmann::ordered_json& json, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

}  // namespace mshap
