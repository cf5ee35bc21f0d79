#include "mshap/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "mshap/random.hpp"

namespace mshap {
namespace {

struct Triple {
  double x1, x2, x3;
};

Triple block_sums(std::span<const double> row) {
  if (row.size() < 3) {
    throw DimensionError("response functions need at least 3 covariates, got " +
                         std::to_string(row.size()));
  }
  if (row.size() == 3) return {row[0], row[1], row[2]};
  std::array<double, 3> acc = {0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < row.size(); ++j) acc[j % 3] += row[j];
  return {acc[0], acc[1], acc[2]};
}

std::span<const double> row_span(const Matrix& m, Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

ShapExplanation explain(const Model& model, const Matrix& instances,
                        const BackgroundSet& background, const PipelineOptions& options,
                        std::uint64_t stream) {
  if (model.arity() > options.enumeration_limit) {
    return explain_sampling(model, instances, background, options.sampling_permutations,
                            derive_seed(options.seed, stream));
  }
  ShapleyOptions exact;
  exact.enumeration_limit = options.enumeration_limit;
  return explain_exact(model, instances, background, exact);
}

}  // namespace

std::string_view to_string(ResponseId id) {
  switch (id) {
    case ResponseId::Y1A: return "Y1A";
    case ResponseId::Y1B: return "Y1B";
    case ResponseId::Y2A: return "Y2A";
    case ResponseId::Y2B: return "Y2B";
    case ResponseId::Y2C: return "Y2C";
    case ResponseId::Y2D: return "Y2D";
    case ResponseId::Y2E: return "Y2E";
    case ResponseId::Y2F: return "Y2F";
  }
  return "unknown";
}

ResponseId parse_response_id(std::string_view name) {
  for (ResponseId id : kFirstPartResponses) {
    if (to_string(id) == name) return id;
  }
  for (ResponseId id : kSecondPartResponses) {
    if (to_string(id) == name) return id;
  }
  throw ParseError("unknown response function '" + std::string(name) + "'");
}

bool is_first_part(ResponseId id) {
  return std::find(kFirstPartResponses.begin(), kFirstPartResponses.end(), id) !=
         kFirstPartResponses.end();
}

bool is_second_part(ResponseId id) {
  return std::find(kSecondPartResponses.begin(), kSecondPartResponses.end(), id) !=
         kSecondPartResponses.end();
}

double eval_response(ResponseId id, std::span<const double> row) {
  const auto [x1, x2, x3] = block_sums(row);
  switch (id) {
    case ResponseId::Y1A:
    case ResponseId::Y2A:
      return x1 + x2 + x3;
    case ResponseId::Y1B:
    case ResponseId::Y2B:
      return 2.0 * x1 + 2.0 * x2 + 3.0 * x3;
    case ResponseId::Y2C:
      return x1 * x2 * x3;
    case ResponseId::Y2D:
      return (x1 * x1) * (x2 * x2 * x2) * (x3 * x3 * x3 * x3);
    case ResponseId::Y2E:
      return (x1 + x2) / (x1 + x2 + x3);
    case ResponseId::Y2F:
      return x1 * x2 / (x1 + x1 * x2 + x1 * x1 * x3 * x3);
  }
  throw InvalidInputError("unknown response function");
}

bool denominator_ok(ResponseId id, std::span<const double> row) {
  const auto [x1, x2, x3] = block_sums(row);
  switch (id) {
    case ResponseId::Y2E:
      return std::abs(x1 + x2 + x3) >= kDenominatorGuard;
    case ResponseId::Y2F:
      return std::abs(x1 + x1 * x2 + x1 * x1 * x3 * x3) >= kDenominatorGuard;
    default:
      return true;
  }
}

Model response_model(ResponseId id, Index arity) {
  if (arity < 3) {
    throw DimensionError("response functions need at least 3 covariates, got " +
                         std::to_string(arity));
  }
  return Model(arity, [id](std::span<const double> x) { return eval_response(id, x); });
}

void CovariateSpec::validate() const {
  if (bounds.empty()) throw InvalidInputError("covariate spec has no features");
  for (std::size_t j = 0; j < bounds.size(); ++j) {
    const auto [lo, hi] = bounds[j];
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
      throw InvalidInputError("covariate " + std::to_string(j + 1) +
                              " needs finite bounds with lo < hi");
    }
  }
}

CovariateSpec CovariateSpec::three_feature_default() {
  return CovariateSpec{{{-10.0, 10.0}, {0.0, 20.0}, {-5.0, -1.0}}};
}

CovariateSpec CovariateSpec::symmetric_unit(Index p) {
  return CovariateSpec{std::vector<std::pair<double, double>>(static_cast<std::size_t>(p),
                                                              {-1.0, 1.0})};
}

Matrix gen_covariates(const CovariateSpec& spec, Index n, std::uint64_t seed) {
  return gen_covariates(spec, n, seed, {}).rows;
}

GuardedSample gen_covariates(const CovariateSpec& spec, Index n, std::uint64_t seed,
                             const std::function<bool(std::span<const double>)>& accept) {
  spec.validate();
  if (n < 1) throw InvalidInputError("sample count must be at least 1");
  Rng rng(seed);
  GuardedSample out;
  out.rows.resize(n, spec.features());
  for (Index i = 0; i < n; ++i) {
    for (int attempt = 0;; ++attempt) {
      for (Index j = 0; j < spec.features(); ++j) {
        const auto [lo, hi] = spec.bounds[static_cast<std::size_t>(j)];
        out.rows(i, j) = rng.uniform(lo, hi);
      }
      if (!accept || accept(row_span(out.rows, i))) break;
      if (attempt == kMaxResamples) {
        throw InvalidInputError("row " + std::to_string(i + 1) + " rejected after " +
                                std::to_string(kMaxResamples) + " redraws");
      }
      ++out.resampled;
    }
  }
  return out;
}

PipelineOutput run_pipeline(const Model& f, const Model& g, const Matrix& instances,
                            const BackgroundSet& background, const ScoreParams& params,
                            const PipelineOptions& options) {
  params.validate();
  if (f.arity() != g.arity()) throw DimensionError("model parts differ in arity");
  const Model h(f.arity(), [&f, &g](std::span<const double> x) { return f(x) * g(x); });

  PipelineOutput out;
  out.part_f = explain(f, instances, background, options, 1);
  out.part_g = explain(g, instances, background, options, 2);
  out.reference = explain(h, instances, background, options, 3);
  out.sampled_reference = h.arity() > options.enumeration_limit;
  out.mu_h = out.reference.baseline;
  for (std::size_t k = 0; k < 4; ++k) {
    out.mshap[k] = combine(out.part_f, out.part_g, out.mu_h, kAllAlphaMethods[k]);
    out.scores[k] = score_matrices(out.mshap[k].values, out.reference.values, params);
  }
  return out;
}

void ScenarioSpec::validate() const {
  if (!is_first_part(y1)) {
    throw InvalidInputError("y1 must be Y1A or Y1B, got " + std::string(to_string(y1)));
  }
  if (!is_second_part(y2)) {
    throw InvalidInputError("y2 must be one of Y2A..Y2F, got " + std::string(to_string(y2)));
  }
  if (n < 10) throw InvalidInputError("scenario needs n >= 10, got " + std::to_string(n));
  if (background_size < 1) throw InvalidInputError("background_size must be positive");
  if (sampling_permutations < 1) throw InvalidInputError("sampling_permutations must be positive");
  ScoreParams{theta1, theta2}.validate();
  covariates.validate();
  if (covariates.features() < 3) {
    throw InvalidInputError("scenarios need at least 3 covariates");
  }
}

ScenarioResult run_scenario(const ScenarioSpec& spec) {
  spec.validate();
  ScenarioResult result;
  result.spec = spec;

  const auto accept = [&spec](std::span<const double> row) {
    return denominator_ok(spec.y1, row) && denominator_ok(spec.y2, row);
  };
  GuardedSample sample = gen_covariates(spec.covariates, spec.n, derive_seed(spec.seed, 0), accept);
  result.resampled_rows = sample.resampled;

  Matrix background_rows;
  if (spec.background_size >= spec.n) {
    background_rows = sample.rows;
  } else {
    std::vector<Index> idx(static_cast<std::size_t>(spec.n));
    std::iota(idx.begin(), idx.end(), Index{0});
    Rng rng(derive_seed(spec.seed, 1));
    rng.shuffle(std::span<Index>(idx));
    idx.resize(static_cast<std::size_t>(spec.background_size));
    std::sort(idx.begin(), idx.end());
    background_rows.resize(spec.background_size, sample.rows.cols());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      background_rows.row(static_cast<Index>(r)) = sample.rows.row(idx[r]);
    }
  }

  const Index p = spec.covariates.features();
  PipelineOptions options;
  options.enumeration_limit = spec.enumeration_limit;
  options.sampling_permutations = spec.sampling_permutations;
  options.seed = derive_seed(spec.seed, 2);
  const PipelineOutput out =
      run_pipeline(response_model(spec.y1, p), response_model(spec.y2, p), sample.rows,
                   BackgroundSet(std::move(background_rows)), ScoreParams{spec.theta1, spec.theta2},
                   options);
  result.sampled_reference = out.sampled_reference;
  for (std::size_t k = 0; k < 4; ++k) {
    result.methods[k].method = kAllAlphaMethods[k];
    result.methods[k].score = out.scores[k];
    result.methods[k].fallback_rows = static_cast<Index>(out.mshap[k].fallback_rows.size());
  }
  return result;
}

GridSpec GridSpec::full() {
  GridSpec grid;
  grid.theta1.clear();
  grid.theta2.clear();
  for (int k = 0; k < 20; ++k) grid.theta1.push_back(1.5 + k);
  for (int k = 0; k < 10; ++k) grid.theta2.push_back(1.0 + 5.0 * k);
  return grid;
}

std::vector<ScenarioSpec> make_grid(const GridSpec& grid) {
  std::vector<ScenarioSpec> cells;
  std::uint64_t index = 0;
  for (ResponseId y1 : grid.y1) {
    for (ResponseId y2 : grid.y2) {
      for (double t1 : grid.theta1) {
        for (double t2 : grid.theta2) {
          ScenarioSpec spec;
          spec.y1 = y1;
          spec.y2 = y2;
          spec.theta1 = t1;
          spec.theta2 = t2;
          spec.n = grid.n;
          spec.background_size = grid.background_size;
          spec.covariates = grid.covariates;
          spec.enumeration_limit = grid.enumeration_limit;
          spec.sampling_permutations = grid.sampling_permutations;
          spec.seed = derive_seed(grid.seed, index++);
          cells.push_back(std::move(spec));
        }
      }
    }
  }
  return cells;
}

std::vector<ScenarioResult> run_grid(std::span<const ScenarioSpec> grid, int threads) {
  if (grid.empty()) throw InvalidInputError("scenario grid is empty");
  std::vector<ScenarioResult> results(grid.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t k = next++; k < grid.size(); k = next++) {
      try {
        results[k] = run_scenario(grid[k]);
      } catch (const Error& e) {
        results[k] = ScenarioResult{};
        results[k].spec = grid[k];
        for (std::size_t m = 0; m < 4; ++m) results[k].methods[m].method = kAllAlphaMethods[m];
        results[k].error = e.what();
      }
    }
  };
  const int count = std::clamp(threads, 1, static_cast<int>(grid.size()));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  }
  return results;
}

std::array<ScoreBreakdown, 4> method_means(std::span<const ScenarioResult> results) {
  std::array<ScoreBreakdown, 4> out;
  for (std::size_t k = 0; k < 4; ++k) {
    std::vector<ScoreBreakdown> items;
    for (const ScenarioResult& r : results) {
      if (!r.error) items.push_back(r.methods[k].score);
    }
    out[k] = mean_breakdown(items);
  }
  return out;
}

}  // namespace mshap
