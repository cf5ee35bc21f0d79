#include "mshap/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mshap {
namespace {

// (1 + theta) / denominator, rescaled when the plain sum would overflow.
double saturating_ratio(double theta, double a, double b, double c) {
  const double denom = a + b + c;
  if (std::isfinite(denom)) return std::min(1.0, (1.0 + theta) / denom);
  return std::min(1.0, (0.5 + 0.5 * theta) / (0.5 * a + 0.5 * b + 0.5 * c));
}

}  // namespace

void ScoreParams::validate() const {
  if (!(theta1 > 0.0) || !std::isfinite(theta1)) {
    throw InvalidInputError("theta1 must be positive and finite, got " + std::to_string(theta1));
  }
  if (!(theta2 > 0.0) || !std::isfinite(theta2)) {
    throw InvalidInputError("theta2 must be positive and finite, got " + std::to_string(theta2));
  }
}

double lambda1(double s, double k, double theta1) {
  if ((s > 0.0 && k > 0.0) || (s < 0.0 && k < 0.0)) return 1.0;
  return saturating_ratio(theta1, std::abs(s), std::abs(k), theta1);
}

double lambda2(double s, double k, double theta2) {
  const double gap = std::abs(s - k);
  if (std::isfinite(gap)) {
    if (gap <= theta2) return 1.0;
    return saturating_ratio(theta2, gap, 1.0, 0.0);
  }
  // s - k overflowed; the half gap cannot.
  return std::min(1.0, (0.5 + 0.5 * theta2) / (std::abs(0.5 * s - 0.5 * k) + 0.5));
}

double lambda3(int rank_s, int rank_k) {
  return 1.0 / (static_cast<double>(std::abs(rank_s - rank_k)) + 1.0);
}

double beta(double s, double k, int rank_s, int rank_k, const ScoreParams& params) {
  return lambda1(s, k, params.theta1) + lambda2(s, k, params.theta2) + lambda3(rank_s, rank_k);
}

bool same_sign(double s, double k) {
  return (s > 0.0 && k > 0.0) || (s < 0.0 && k < 0.0) || (s == 0.0 && k == 0.0);
}

ScoreBreakdown score_matrices(const Matrix& candidate, const Matrix& reference,
                              const ScoreParams& params) {
  params.validate();
  if (candidate.rows() != reference.rows() || candidate.cols() != reference.cols()) {
    throw DimensionError("score: candidate is " + std::to_string(candidate.rows()) + "x" +
                         std::to_string(candidate.cols()) + ", reference is " +
                         std::to_string(reference.rows()) + "x" +
                         std::to_string(reference.cols()));
  }
  if (candidate.size() == 0) throw DimensionError("score: matrices are empty");

  CompensatedSum total, direction, value, rank;
  Index sign_hits = 0;
  Index rank_hits = 0;
  for (Index i = 0; i < candidate.rows(); ++i) {
    const RankVector rank_s = importance_ranks(candidate.row(i));
    const RankVector rank_k = importance_ranks(reference.row(i));
    for (Index j = 0; j < candidate.cols(); ++j) {
      const double s = candidate(i, j);
      const double k = reference(i, j);
      const double l1 = lambda1(s, k, params.theta1);
      const double l2 = lambda2(s, k, params.theta2);
      const double l3 = lambda3(rank_s[j], rank_k[j]);
      direction.add(l1);
      value.add(l2);
      rank.add(l3);
      total.add(l1 + l2 + l3);
      sign_hits += same_sign(s, k) ? 1 : 0;
      rank_hits += rank_s[j] == rank_k[j] ? 1 : 0;
    }
  }
  const double cells = static_cast<double>(candidate.size());
  ScoreBreakdown out;
  out.score = total.value() / cells;
  out.direction_score = direction.value() / cells;
  out.relative_value_score = value.value() / cells;
  out.rank_score = rank.value() / cells;
  out.pct_same_sign = static_cast<double>(sign_hits) / cells;
  out.pct_same_rank = static_cast<double>(rank_hits) / cells;
  return out;
}

ScoreBreakdown mean_breakdown(std::span<const ScoreBreakdown> items) {
  ScoreBreakdown out;
  if (items.empty()) return out;
  CompensatedSum a, b, c, d, e, f;
  for (const ScoreBreakdown& x : items) {
    a.add(x.score);
    b.add(x.direction_score);
    c.add(x.relative_value_score);
    d.add(x.rank_score);
    e.add(x.pct_same_sign);
    f.add(x.pct_same_rank);
  }
  const double n = static_cast<double>(items.size());
  out.score = a.value() / n;
  out.direction_score = b.value() / n;
  out.relative_value_score = c.value() / n;
  out.rank_score = d.value() / n;
  out.pct_same_sign = e.value() / n;
  out.pct_same_rank = f.value() / n;
  return out;
}

}  // namespace mshap
