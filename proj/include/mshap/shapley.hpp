#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mshap/common.hpp"

namespace mshap {

// A deterministic prediction function over a fixed number of real covariates.
class Model {
 public:
  using Fn = std::function<double(std::span<const double>)>;

  Model(Index arity, Fn fn);

  Index arity() const { return arity_; }
  double operator()(std::span<const double> x) const { return fn_(x); }

  double operator()(const Vector& x) const {
    return fn_(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
  }

 private:
  Index arity_;
  Fn fn_;
};

// Reference observations the interventional value function averages over.
class BackgroundSet {
 public:
  explicit BackgroundSet(Matrix data);

  const Matrix& data() const { return data_; }
  Index rows() const { return data_.rows(); }
  Index features() const { return data_.cols(); }

 private:
  Matrix data_;
};

// Per-feature attributions of one model part over n observations.
struct ShapExplanation {
  Matrix values;  // n x p
  double baseline = 0.0;
  Vector predictions;  // n
  std::vector<std::string> feature_names;  // empty, or p labels

  Index rows() const { return values.rows(); }
  Index features() const { return values.cols(); }
};

struct ShapRow {
  Vector phi;
  double baseline = 0.0;
  double prediction = 0.0;
};

struct SampledShapRow {
  Vector phi;
  Vector std_error;  // per-feature standard error of the estimate; zero when exhaustive
  double baseline = 0.0;
  double prediction = 0.0;
  bool exhaustive = false;
};

struct ShapleyOptions {
  int enumeration_limit = 16;
};

double baseline(const Model& model, const BackgroundSet& background);

// Exact interventional Shapley values by enumerating all 2^p coalitions.
ShapRow exact_shapley(const Model& model, std::span<const double> instance,
                      const BackgroundSet& background, const ShapleyOptions& options = {});

// Monte Carlo estimate from random feature orderings. Each ordering averages
// its marginal contributions over the whole background set. When
// n_permutations >= p! every ordering is visited exactly once instead, and
// the result equals exact_shapley.
SampledShapRow sampling_shapley(const Model& model, std::span<const double> instance,
                                const BackgroundSet& background, std::int64_t n_permutations,
                                std::uint64_t seed);

// Row-wise drivers producing a full explanation matrix.
ShapExplanation explain_exact(const Model& model, const Matrix& instances,
                              const BackgroundSet& background, const ShapleyOptions& options = {});
ShapExplanation explain_sampling(const Model& model, const Matrix& instances,
                                 const BackgroundSet& background, std::int64_t n_permutations,
                                 std::uint64_t seed);

struct LocalAccuracyReport {
  std::vector<bool> passed;
  Vector residuals;  // predictions - baseline - row sum
  double max_residual = 0.0;  // largest |residual| / max(1, |prediction|)
  Index worst_row = -1;

  bool all_passed() const;
  Index failures() const;
};

// Row i passes iff |pred_i - baseline - sum_j values_ij| <= tol_rel * max(1, |pred_i|).
LocalAccuracyReport validate_local_accuracy(const Matrix& values, double baseline,
                                            const Vector& predictions, double tol_rel);
LocalAccuracyReport validate_local_accuracy(const ShapExplanation& expl, double tol_rel);

}  // namespace mshap
