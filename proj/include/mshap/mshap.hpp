#pragma once

#include <span>
#include <string>
#include <vector>

#include "mshap/common.hpp"
#include "mshap/shapley.hpp"

namespace mshap {

// Tolerances shared by the composition routines.
inline constexpr double kInputLocalAccuracyTol = 1e-6;
inline constexpr double kDegenerateRelTol = 1e-12;
inline constexpr double kResidualCloseRel = 1e-12;  // see combine()

template <typename Scalar>
using ColumnVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Pre-correction attribution of the product of two additive explanations:
// each feature takes its baseline cross terms plus half of every pairwise
// product it participates in. Sums to x_hat * y_hat - mu_f * mu_g.
template <typename DerivedX, typename DerivedY>
ColumnVector<typename DerivedX::Scalar> mshap_prime(const Eigen::MatrixBase<DerivedX>& sx,
                                                    const Eigen::MatrixBase<DerivedY>& sy,
                                                    typename DerivedX::Scalar mu_f,
                                                    typename DerivedX::Scalar mu_g) {
  using Scalar = typename DerivedX::Scalar;
  if (sx.size() != sy.size()) {
    throw DimensionError("attribution rows differ in length: " + std::to_string(sx.size()) +
                         " vs " + std::to_string(sy.size()));
  }
  if (sx.size() < 1) throw DimensionError("attribution rows must be nonempty");
  const Scalar sum_x = sx.sum();
  const Scalar sum_y = sy.sum();
  ColumnVector<Scalar> out(sx.size());
  for (Index j = 0; j < sx.size(); ++j) {
    out[j] = (mu_f * sy[j] + sx[j] * mu_g) + Scalar(0.5) * (sx[j] * sum_y + sy[j] * sum_x);
  }
  return out;
}

template <typename Scalar>
Scalar compute_alpha(Scalar mu_f, Scalar mu_g, Scalar mu_h) {
  return mu_f * mu_g - mu_h;
}

template <typename Scalar>
struct AlphaWeights {
  ColumnVector<Scalar> weights;
  bool fallback = false;  // degenerate denominator, uniform weights used instead
};

// Share of alpha each feature receives. Weights always sum to one.
// RawWeights divides by the row's s' total, which equals z_hat - mu_f*mu_g
// for locally accurate inputs.
template <typename Derived>
AlphaWeights<typename Derived::Scalar> alpha_weights(const Eigen::MatrixBase<Derived>& s_prime,
                                                     AlphaMethod method,
                                                     typename Derived::Scalar z_hat,
                                                     typename Derived::Scalar mu_f_mu_g) {
  static_assert(Derived::ColsAtCompileTime == 1, "s_prime must be a column vector");
  using Scalar = typename Derived::Scalar;
  using std::abs;
  const Index p = s_prime.size();
  if (p < 1) throw DimensionError("attribution rows must be nonempty");

  CompensatedSum whole_acc;
  CompensatedSum abs_acc;
  CompensatedSum sq_acc;
  for (Index j = 0; j < p; ++j) {
    whole_acc.add(s_prime[j]);
    abs_acc.add(abs(s_prime[j]));
    sq_acc.add(s_prime[j] * s_prime[j]);
  }
  const Scalar whole = whole_acc.value();
  const Scalar total_abs = abs_acc.value();
  const Scalar total_sq = sq_acc.value();

  const Scalar expected = z_hat - mu_f_mu_g;
  const Scalar scale = std::max({Scalar(1), abs(z_hat), abs(mu_f_mu_g), total_abs});
  if (!(abs(whole - expected) <= kInputLocalAccuracyTol * scale)) {
    throw InvalidInputError("s' total disagrees with z_hat - mu_f*mu_g");
  }

  AlphaWeights<Scalar> out;
  const Scalar floor = kDegenerateRelTol * std::max(Scalar(1), abs(z_hat));
  switch (method) {
    case AlphaMethod::Uniform:
      break;
    case AlphaMethod::RawWeights:
      if (abs(expected) < floor || abs(whole) < floor) {
        out.fallback = true;
      } else {
        out.weights = s_prime / whole;
      }
      break;
    case AlphaMethod::AbsoluteWeights:
      if (total_abs < kDegenerateRelTol) {
        out.fallback = true;
      } else {
        out.weights = s_prime.cwiseAbs() / total_abs;
      }
      break;
    case AlphaMethod::SquaredWeights:
      if (total_sq < kDegenerateRelTol) {
        out.fallback = true;
      } else {
        out.weights = s_prime.cwiseAbs2() / total_sq;
      }
      break;
  }
  if (out.weights.size() == 0) {
    out.weights = ColumnVector<Scalar>::Constant(p, Scalar(1) / static_cast<Scalar>(p));
  }
  return out;
}

template <typename Scalar>
struct DistributedRow {
  ColumnVector<Scalar> values;
  bool fallback = false;
};

template <typename Derived>
DistributedRow<typename Derived::Scalar> distribute_alpha(const Eigen::MatrixBase<Derived>& s_prime,
                                                          typename Derived::Scalar alpha,
                                                          AlphaMethod method,
                                                          typename Derived::Scalar z_hat,
                                                          typename Derived::Scalar mu_f_mu_g) {
  auto w = alpha_weights(s_prime, method, z_hat, mu_f_mu_g);
  DistributedRow<typename Derived::Scalar> out;
  out.values = s_prime + alpha * w.weights;
  out.fallback = w.fallback;
  return out;
}

// Attributions of the product model z = x * y.
struct MshapExplanation {
  Matrix values;  // n x p
  double mu_h = 0.0;
  double alpha = 0.0;
  AlphaMethod method = AlphaMethod::AbsoluteWeights;
  std::vector<std::string> feature_names;
  Vector predictions;  // x_hat * y_hat
  std::vector<Index> fallback_rows;  // rows where the method degenerated to Uniform

  Index rows() const { return values.rows(); }
  Index features() const { return values.cols(); }
};

double mean_product_baseline(const Vector& preds_f, const Vector& preds_g);

// Requires both inputs to be locally accurate to kInputLocalAccuracyTol.
MshapExplanation combine(const ShapExplanation& expl_f, const ShapExplanation& expl_g, double mu_h,
                         AlphaMethod method);

// Weighted sum of explanation sets (values, baselines, and predictions when
// every part carries them). Feature names must agree.
ShapExplanation linear_combine(std::span<const double> weights,
                               std::span<const ShapExplanation> parts);
ShapExplanation linear_combine(std::span<const double> weights,
                               std::span<const MshapExplanation> parts);

ShapExplanation as_explanation(const MshapExplanation& expl);

}  // namespace mshap
