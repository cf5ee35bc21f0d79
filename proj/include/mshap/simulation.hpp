#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mshap/common.hpp"
#include "mshap/mshap.hpp"
#include "mshap/scoring.hpp"
#include "mshap/shapley.hpp"

namespace mshap {

// Analytic response functions used as the two model parts.
//   Y1A, Y2A: x1 + x2 + x3
//   Y1B, Y2B: 2 x1 + 2 x2 + 3 x3
//   Y2C: x1 x2 x3
//   Y2D: x1^2 x2^3 x3^4
//   Y2E: (x1 + x2) / (x1 + x2 + x3)
//   Y2F: x1 x2 / (x1 + x1 x2 + x1^2 x3^2)
// With more than three covariates, x_k stands for the sum of every
// covariate whose zero-based index is congruent to k - 1 modulo 3.
enum class ResponseId { Y1A, Y1B, Y2A, Y2B, Y2C, Y2D, Y2E, Y2F };

inline constexpr std::array<ResponseId, 2> kFirstPartResponses = {ResponseId::Y1A, ResponseId::Y1B};
inline constexpr std::array<ResponseId, 6> kSecondPartResponses = {
    ResponseId::Y2A, ResponseId::Y2B, ResponseId::Y2C,
    ResponseId::Y2D, ResponseId::Y2E, ResponseId::Y2F};

std::string_view to_string(ResponseId id);
ResponseId parse_response_id(std::string_view name);
bool is_first_part(ResponseId id);
bool is_second_part(ResponseId id);

inline constexpr double kDenominatorGuard = 1e-3;
inline constexpr int kMaxResamples = 100;

double eval_response(ResponseId id, std::span<const double> row);

// False when the row puts a rational response within kDenominatorGuard of
// its pole. Polynomial responses always accept.
bool denominator_ok(ResponseId id, std::span<const double> row);

Model response_model(ResponseId id, Index arity);

struct CovariateSpec {
  std::vector<std::pair<double, double>> bounds;  // per-feature uniform [lo, hi)

  Index features() const { return static_cast<Index>(bounds.size()); }
  void validate() const;

  // x1 ~ U[-10, 10], x2 ~ U[0, 20], x3 ~ U[-5, -1].
  static CovariateSpec three_feature_default();
  static CovariateSpec symmetric_unit(Index p);
};

Matrix gen_covariates(const CovariateSpec& spec, Index n, std::uint64_t seed);

struct GuardedSample {
  Matrix rows;
  Index resampled = 0;
};

// Like gen_covariates, but redraws any row the guard rejects, up to
// kMaxResamples times per row.
GuardedSample gen_covariates(const CovariateSpec& spec, Index n, std::uint64_t seed,
                             const std::function<bool(std::span<const double>)>& accept);

struct PipelineOptions {
  int enumeration_limit = 16;
  std::int64_t sampling_permutations = 1000;  // used when p exceeds enumeration_limit
  std::uint64_t seed = 0;
};

struct PipelineOutput {
  ShapExplanation part_f;
  ShapExplanation part_g;
  ShapExplanation reference;
  double mu_h = 0.0;
  bool sampled_reference = false;
  std::array<MshapExplanation, 4> mshap;  // in kAllAlphaMethods order
  std::array<ScoreBreakdown, 4> scores;
};

// Explain both parts and their product on `instances`, compose with every
// alpha method, and score each composition against the product's own
// attributions.
PipelineOutput run_pipeline(const Model& f, const Model& g, const Matrix& instances,
                            const BackgroundSet& background, const ScoreParams& params,
                            const PipelineOptions& options = {});

struct ScenarioSpec {
  ResponseId y1 = ResponseId::Y1A;
  ResponseId y2 = ResponseId::Y2A;
  double theta1 = 1.5;
  double theta2 = 1.0;
  Index n = 100;
  CovariateSpec covariates = CovariateSpec::three_feature_default();
  std::uint64_t seed = 0;
  Index background_size = 100;
  int enumeration_limit = 16;
  std::int64_t sampling_permutations = 1000;

  void validate() const;
};

struct MethodScore {
  AlphaMethod method = AlphaMethod::Uniform;
  ScoreBreakdown score;
  Index fallback_rows = 0;
};

struct ScenarioResult {
  ScenarioSpec spec;
  std::array<MethodScore, 4> methods;
  Index resampled_rows = 0;
  bool sampled_reference = false;
  std::optional<std::string> error;
};

ScenarioResult run_scenario(const ScenarioSpec& spec);

struct GridSpec {
  std::vector<ResponseId> y1 = {kFirstPartResponses.begin(), kFirstPartResponses.end()};
  std::vector<ResponseId> y2 = {kSecondPartResponses.begin(), kSecondPartResponses.end()};
  std::vector<double> theta1 = {1.5, 10.5, 20.5};
  std::vector<double> theta2 = {1.0, 21.0, 46.0};
  Index n = 100;
  Index background_size = 100;
  CovariateSpec covariates = CovariateSpec::three_feature_default();
  std::uint64_t seed = 20220101;
  int enumeration_limit = 16;
  std::int64_t sampling_permutations = 1000;

  // Every theta value listed for the full sweep.
  static GridSpec full();
};

// Cells in y1, y2, theta1, theta2 order; cell k is seeded with
// derive_seed(grid.seed, k).
std::vector<ScenarioSpec> make_grid(const GridSpec& grid);

// Runs every cell; errors are recorded per cell and do not stop the grid.
std::vector<ScenarioResult> run_grid(std::span<const ScenarioSpec> grid, int threads = 1);

// Per-method mean over all successful cells, in kAllAlphaMethods order.
std::array<ScoreBreakdown, 4> method_means(std::span<const ScenarioResult> results);

enum class BenchMethod { Composition, ExactEnumeration, PermutationSampling };
std::string_view to_string(BenchMethod method);

struct BenchRecord {
  Index p = 0;
  Index n = 0;
  BenchMethod method = BenchMethod::Composition;
  double wall_seconds = 0.0;
  double per_observation_seconds = 0.0;
  std::optional<std::string> error;
};

struct BenchConfig {
  std::vector<Index> p_values = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<Index> n_values = {50};
  Index background_size = 100;
  std::uint64_t seed = 7;
  int repetitions = 5;
  std::int64_t sampling_permutations = 32;
  int enumeration_limit = 16;
  double min_batch_seconds = 2e-3;
};

// Times composition from precomputed part explanations against explaining
// the product directly, by enumeration and by permutation sampling.
std::vector<BenchRecord> bench_scaling(const BenchConfig& config);

std::string machine_descriptor();

}  // namespace mshap
