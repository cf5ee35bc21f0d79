#include "mshap/shapley.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "mshap/random.hpp"

namespace mshap {
namespace {

std::span<const double> row_span(const Matrix& m, Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

double mean_prediction(const Model& model, const Matrix& rows) {
  CompensatedSum acc;
  for (Index i = 0; i < rows.rows(); ++i) acc.add(model(row_span(rows, i)));
  return acc.value() / static_cast<double>(rows.rows());
}

void check_arity(const Model& model, const BackgroundSet& background, std::size_t instance_size) {
  if (background.features() != model.arity()) {
    throw DimensionError("background has " + std::to_string(background.features()) +
                         " columns, model arity is " + std::to_string(model.arity()));
  }
  if (static_cast<Index>(instance_size) != model.arity()) {
    throw DimensionError("instance has " + std::to_string(instance_size) +
                         " features, model arity is " + std::to_string(model.arity()));
  }
}

// |S|! (p - |S| - 1)! / p! == 1 / (p * C(p - 1, |S|)). The binomial stays
// exact in 64 bits far beyond any enumerable p.
std::vector<double> coalition_weights(int p) {
  std::vector<double> w(static_cast<std::size_t>(p));
  std::uint64_t binom = 1;  // C(p - 1, s)
  for (int s = 0; s < p; ++s) {
    w[static_cast<std::size_t>(s)] = 1.0 / (static_cast<double>(p) * static_cast<double>(binom));
    binom = binom * static_cast<std::uint64_t>(p - 1 - s) / static_cast<std::uint64_t>(s + 1);
  }
  return w;
}

// Walks one ordering of the features, splicing instance values over the
// background rows, and writes each feature's marginal contribution. The full
// coalition is averaged like every other one, so a feature the model never
// reads contributes exactly zero.
void walk_ordering(const Model& model, std::span<const double> instance, const Matrix& background,
                   std::span<const Index> order, double base, Matrix& work, Vector& contribution) {
  work = background;
  double previous = base;
  for (std::size_t step = 0; step < order.size(); ++step) {
    const Index k = order[step];
    work.col(k).setConstant(instance[static_cast<std::size_t>(k)]);
    const double current = mean_prediction(model, work);
    contribution[k] = current - previous;
    previous = current;
  }
}

}  // namespace

Model::Model(Index arity, Fn fn) : arity_(arity), fn_(std::move(fn)) {
  if (arity_ < 1) throw DimensionError("model arity must be at least 1");
  if (!fn_) throw InvalidInputError("model function is empty");
}

BackgroundSet::BackgroundSet(Matrix data) : data_(std::move(data)) {
  if (data_.rows() < 1) throw DimensionError("background set needs at least one row");
  if (data_.cols() < 1) throw DimensionError("background set needs at least one column");
}

double baseline(const Model& model, const BackgroundSet& background) {
  if (background.features() != model.arity()) {
    throw DimensionError("background has " + std::to_string(background.features()) +
                         " columns, model arity is " + std::to_string(model.arity()));
  }
  return mean_prediction(model, background.data());
}

ShapRow exact_shapley(const Model& model, std::span<const double> instance,
                      const BackgroundSet& background, const ShapleyOptions& options) {
  check_arity(model, background, instance.size());
  const int p = static_cast<int>(model.arity());
  if (p > options.enumeration_limit) {
    throw EnumerationLimitError("exact enumeration over " + std::to_string(p) +
                                " features exceeds the limit of " +
                                std::to_string(options.enumeration_limit));
  }
  if (p > 30) throw EnumerationLimitError("exact enumeration is capped at 30 features");

  const std::uint32_t full = (std::uint32_t{1} << p) - 1;
  std::vector<double> value(std::size_t{full} + 1);

  // Gray-code order: consecutive coalitions differ in one feature, so only
  // one column of the spliced matrix changes per step.
  Matrix work = background.data();
  value[0] = mean_prediction(model, work);
  std::uint32_t coalition = 0;
  for (std::uint32_t k = 1; k <= full; ++k) {
    const int j = std::countr_zero(k);
    coalition ^= std::uint32_t{1} << j;
    if (coalition & (std::uint32_t{1} << j)) {
      work.col(j).setConstant(instance[static_cast<std::size_t>(j)]);
    } else {
      work.col(j) = background.data().col(j);
    }
    value[coalition] = mean_prediction(model, work);
  }
  const double prediction = model(instance);

  const std::vector<double> weight = coalition_weights(p);
  ShapRow out;
  out.phi = Vector::Zero(p);
  out.baseline = value[0];
  out.prediction = prediction;
  for (int j = 0; j < p; ++j) {
    const std::uint32_t bit = std::uint32_t{1} << j;
    CompensatedSum acc;
    for (std::uint32_t s = 0; s <= full; ++s) {
      if (s & bit) continue;
      acc.add(weight[static_cast<std::size_t>(std::popcount(s))] * (value[s | bit] - value[s]));
    }
    out.phi[j] = acc.value();
  }
  return out;
}

SampledShapRow sampling_shapley(const Model& model, std::span<const double> instance,
                                const BackgroundSet& background, std::int64_t n_permutations,
                                std::uint64_t seed) {
  check_arity(model, background, instance.size());
  if (n_permutations < 1) throw InvalidInputError("n_permutations must be at least 1");
  const Index p = model.arity();

  SampledShapRow out;
  out.baseline = mean_prediction(model, background.data());
  out.prediction = model(instance);
  out.phi = Vector::Zero(p);
  out.std_error = Vector::Zero(p);

  // p! saturating; anything above 20! is never reachable by a request count.
  std::int64_t orderings = 1;
  for (Index k = 2; k <= p && orderings <= n_permutations; ++k) orderings *= k;

  std::vector<Index> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), Index{0});
  Matrix work;
  Vector contribution(p);

  if (p <= 20 && orderings <= n_permutations) {
    out.exhaustive = true;
    std::vector<CompensatedSum> total(static_cast<std::size_t>(p));
    std::int64_t count = 0;
    do {
      walk_ordering(model, instance, background.data(), order, out.baseline, work, contribution);
      for (Index j = 0; j < p; ++j) total[static_cast<std::size_t>(j)].add(contribution[j]);
      ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (Index j = 0; j < p; ++j) {
      out.phi[j] = total[static_cast<std::size_t>(j)].value() / static_cast<double>(count);
    }
    return out;
  }

  // Welford running mean and variance per feature.
  Rng rng(seed);
  Vector mean = Vector::Zero(p);
  Vector m2 = Vector::Zero(p);
  for (std::int64_t t = 1; t <= n_permutations; ++t) {
    rng.shuffle(std::span<Index>(order));
    walk_ordering(model, instance, background.data(), order, out.baseline, work, contribution);
    const Vector delta = contribution - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta.cwiseProduct(contribution - mean);
  }
  out.phi = mean;
  if (n_permutations > 1) {
    const double n = static_cast<double>(n_permutations);
    out.std_error = (m2 / (n - 1.0) / n).cwiseSqrt();
  }
  return out;
}

ShapExplanation explain_exact(const Model& model, const Matrix& instances,
                              const BackgroundSet& background, const ShapleyOptions& options) {
  ShapExplanation out;
  out.values.resize(instances.rows(), model.arity());
  out.predictions.resize(instances.rows());
  out.baseline = baseline(model, background);
  for (Index i = 0; i < instances.rows(); ++i) {
    const ShapRow row = exact_shapley(model, row_span(instances, i), background, options);
    out.values.row(i) = row.phi.transpose();
    out.predictions[i] = row.prediction;
  }
  return out;
}

ShapExplanation explain_sampling(const Model& model, const Matrix& instances,
                                 const BackgroundSet& background, std::int64_t n_permutations,
                                 std::uint64_t seed) {
  ShapExplanation out;
  out.values.resize(instances.rows(), model.arity());
  out.predictions.resize(instances.rows());
  out.baseline = baseline(model, background);
  for (Index i = 0; i < instances.rows(); ++i) {
    const SampledShapRow row =
        sampling_shapley(model, row_span(instances, i), background, n_permutations,
                         derive_seed(seed, static_cast<std::uint64_t>(i)));
    out.values.row(i) = row.phi.transpose();
    out.predictions[i] = row.prediction;
  }
  return out;
}

bool LocalAccuracyReport::all_passed() const {
  return std::all_of(passed.begin(), passed.end(), [](bool b) { return b; });
}

Index LocalAccuracyReport::failures() const {
  return static_cast<Index>(std::count(passed.begin(), passed.end(), false));
}

LocalAccuracyReport validate_local_accuracy(const Matrix& values, double base,
                                            const Vector& predictions, double tol_rel) {
  if (predictions.size() != values.rows()) {
    throw DimensionError("prediction count does not match attribution rows");
  }
  LocalAccuracyReport report;
  report.passed.resize(static_cast<std::size_t>(values.rows()));
  report.residuals.resize(values.rows());
  for (Index i = 0; i < values.rows(); ++i) {
    CompensatedSum acc;
    acc.add(predictions[i]);
    acc.add(-base);
    for (Index j = 0; j < values.cols(); ++j) acc.add(-values(i, j));
    const double residual = acc.value();
    const double scale = std::max(1.0, std::abs(predictions[i]));
    const double relative = std::abs(residual) / scale;
    report.residuals[i] = residual;
    report.passed[static_cast<std::size_t>(i)] = relative <= tol_rel;
    if (report.worst_row < 0 || !(relative <= report.max_residual)) {
      report.max_residual = relative;
      report.worst_row = i;
    }
  }
  return report;
}

LocalAccuracyReport validate_local_accuracy(const ShapExplanation& expl, double tol_rel) {
  return validate_local_accuracy(expl.values, expl.baseline, expl.predictions, tol_rel);
}

}  // namespace mshap
