#include "mshap/mshap.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mshap {
namespace {

std::vector<std::string> merged_names(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b, Index p) {
  if (!a.empty() && static_cast<Index>(a.size()) != p) {
    throw DimensionError("feature name count does not match attribution columns");
  }
  if (!b.empty() && static_cast<Index>(b.size()) != p) {
    throw DimensionError("feature name count does not match attribution columns");
  }
  if (a.empty()) return b;
  if (b.empty()) return a;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) {
      throw DimensionError("feature names differ at column " + std::to_string(j + 1) + ": '" +
                           a[j] + "' vs '" + b[j] + "'");
    }
  }
  return a;
}

void require_accurate(const ShapExplanation& expl, const char* which) {
  if (expl.predictions.size() != expl.rows()) {
    throw DimensionError(std::string(which) + ": prediction count does not match attribution rows");
  }
  const LocalAccuracyReport report = validate_local_accuracy(expl, kInputLocalAccuracyTol);
  if (!report.all_passed()) {
    throw InvalidInputError(std::string(which) + " explanation is not locally accurate: row " +
                            std::to_string(report.worst_row + 1) + " has relative residual " +
                            std::to_string(report.max_residual));
  }
}

// Rounding in entries of order |s'| can exceed the tolerance when z_hat is
// near zero. A material leftover of z_hat - mu_h - sum(row) goes into the
// smallest nonzero entry, whose ulp is the finest available. Zero entries
// stay zero, and rows already accurate to kResidualCloseRel are untouched.
void close_residual(Vector& row, double z_hat, double mu_h) {
  CompensatedSum acc;
  acc.add(z_hat);
  acc.add(-mu_h);
  for (Index j = 0; j < row.size(); ++j) acc.add(-row[j]);
  const double r = acc.value();
  if (!(std::abs(r) > kResidualCloseRel * std::max(1.0, std::abs(z_hat)))) return;
  Index pick = -1;
  for (Index j = 0; j < row.size(); ++j) {
    if (row[j] != 0.0 && (pick < 0 || std::abs(row[j]) < std::abs(row[pick]))) pick = j;
  }
  if (pick >= 0) row[pick] += r;
}

template <typename Part, typename ValuesOf, typename BaselineOf>
ShapExplanation combine_linear(std::span<const double> weights, std::span<const Part> parts,
                               ValuesOf values_of, BaselineOf baseline_of) {
  if (parts.empty()) throw DimensionError("linear_combine needs at least one part");
  if (weights.size() != parts.size()) {
    throw DimensionError("linear_combine: " + std::to_string(weights.size()) + " weights for " +
                         std::to_string(parts.size()) + " parts");
  }
  const Matrix& first = values_of(parts[0]);
  ShapExplanation out;
  out.values = Matrix::Zero(first.rows(), first.cols());
  out.feature_names = parts[0].feature_names;
  bool with_predictions = true;
  for (const Part& part : parts) {
    const Matrix& v = values_of(part);
    if (v.rows() != first.rows() || v.cols() != first.cols()) {
      throw DimensionError("linear_combine: parts differ in shape");
    }
    out.feature_names = merged_names(out.feature_names, part.feature_names, first.cols());
    with_predictions = with_predictions && part.predictions.size() == first.rows();
  }
  double base = 0.0;
  if (with_predictions) out.predictions = Vector::Zero(first.rows());
  for (std::size_t k = 0; k < parts.size(); ++k) {
    out.values += weights[k] * values_of(parts[k]);
    base += weights[k] * baseline_of(parts[k]);
    if (with_predictions) out.predictions += weights[k] * parts[k].predictions;
  }
  out.baseline = base;
  return out;
}

}  // namespace

std::string_view to_string(AlphaMethod method) {
  switch (method) {
    case AlphaMethod::Uniform:
      return "uniform";
    case AlphaMethod::RawWeights:
      return "raw";
    case AlphaMethod::AbsoluteWeights:
      return "absolute";
    case AlphaMethod::SquaredWeights:
      return "squared";
  }
  return "unknown";
}

AlphaMethod parse_alpha_method(std::string_view name) {
  for (AlphaMethod m : kAllAlphaMethods) {
    if (to_string(m) == name) return m;
  }
  throw ParseError("unknown alpha method '" + std::string(name) +
                   "' (expected uniform, raw, absolute, or squared)");
}

double mean_product_baseline(const Vector& preds_f, const Vector& preds_g) {
  if (preds_f.size() != preds_g.size()) {
    throw DimensionError("prediction vectors differ in length: " + std::to_string(preds_f.size()) +
                         " vs " + std::to_string(preds_g.size()));
  }
  if (preds_f.size() == 0) throw DimensionError("prediction vectors are empty");
  CompensatedSum acc;
  for (Index i = 0; i < preds_f.size(); ++i) acc.add(preds_f[i] * preds_g[i]);
  return acc.value() / static_cast<double>(preds_f.size());
}

MshapExplanation combine(const ShapExplanation& expl_f, const ShapExplanation& expl_g, double mu_h,
                         AlphaMethod method) {
  if (expl_f.rows() != expl_g.rows() || expl_f.features() != expl_g.features()) {
    throw DimensionError("explanations differ in shape: " + std::to_string(expl_f.rows()) + "x" +
                         std::to_string(expl_f.features()) + " vs " +
                         std::to_string(expl_g.rows()) + "x" + std::to_string(expl_g.features()));
  }
  if (expl_f.rows() < 1 || expl_f.features() < 1) {
    throw DimensionError("explanations must have at least one row and one feature");
  }

  MshapExplanation out;
  out.feature_names = merged_names(expl_f.feature_names, expl_g.feature_names, expl_f.features());
  require_accurate(expl_f, "first");
  require_accurate(expl_g, "second");

  const double mu_f = expl_f.baseline;
  const double mu_g = expl_g.baseline;
  const double mu_f_mu_g = mu_f * mu_g;
  out.mu_h = mu_h;
  out.alpha = compute_alpha(mu_f, mu_g, mu_h);
  out.method = method;
  out.values.resize(expl_f.rows(), expl_f.features());
  out.predictions.resize(expl_f.rows());

  for (Index i = 0; i < expl_f.rows(); ++i) {
    const double z_hat = expl_f.predictions[i] * expl_g.predictions[i];
    const Vector s_prime =
        mshap_prime(expl_f.values.row(i).transpose(), expl_g.values.row(i).transpose(), mu_f, mu_g);
    auto row = distribute_alpha(s_prime, out.alpha, method, z_hat, mu_f_mu_g);
    close_residual(row.values, z_hat, mu_h);
    out.values.row(i) = row.values.transpose();
    out.predictions[i] = z_hat;
    if (row.fallback) out.fallback_rows.push_back(i);
  }
  return out;
}

ShapExplanation linear_combine(std::span<const double> weights,
                               std::span<const ShapExplanation> parts) {
  return combine_linear(
      weights, parts, [](const ShapExplanation& e) -> const Matrix& { return e.values; },
      [](const ShapExplanation& e) { return e.baseline; });
}

ShapExplanation linear_combine(std::span<const double> weights,
                               std::span<const MshapExplanation> parts) {
  return combine_linear(
      weights, parts, [](const MshapExplanation& e) -> const Matrix& { return e.values; },
      [](const MshapExplanation& e) { return e.mu_h; });
}

ShapExplanation as_explanation(const MshapExplanation& expl) {
  ShapExplanation out;
  out.values = expl.values;
  out.baseline = expl.mu_h;
  out.predictions = expl.predictions;
  out.feature_names = expl.feature_names;
  return out;
}

}  // namespace mshap
