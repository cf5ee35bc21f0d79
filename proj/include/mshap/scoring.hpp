#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "mshap/common.hpp"

namespace mshap {

// Slack parameters of the agreement score, in attribution units.
struct ScoreParams {
  double theta1 = 1.5;  // direction slack
  double theta2 = 1.0;  // value slack

  void validate() const;
};

// Cell-averaged agreement between a candidate and a reference attribution
// matrix. score == direction_score + relative_value_score + rank_score.
struct ScoreBreakdown {
  double score = 0.0;
  double direction_score = 0.0;
  double relative_value_score = 0.0;
  double rank_score = 0.0;
  double pct_same_sign = 0.0;
  double pct_same_rank = 0.0;
};

using RankVector = Eigen::VectorXi;

// Direction agreement: 1 for strictly same-signed values, otherwise decays
// with the combined magnitude beyond theta1.
double lambda1(double s, double k, double theta1);

// Value agreement: 1 while |s - k| <= theta2.
double lambda2(double s, double k, double theta2);

// Rank 1 is the largest absolute value; ties go to the lower index.
template <typename Derived>
RankVector importance_ranks(const Eigen::MatrixBase<Derived>& row) {
  const Index p = row.size();
  RankVector order(p);
  for (Index j = 0; j < p; ++j) order[j] = static_cast<int>(j);
  std::stable_sort(order.begin(), order.end(), [&row](int a, int b) {
    return std::abs(row[a]) > std::abs(row[b]);
  });
  RankVector ranks(p);
  for (Index r = 0; r < p; ++r) ranks[order[r]] = static_cast<int>(r + 1);
  return ranks;
}

double lambda3(int rank_s, int rank_k);

double beta(double s, double k, int rank_s, int rank_k, const ScoreParams& params);

// Same sign, or both exactly zero.
bool same_sign(double s, double k);

ScoreBreakdown score_matrices(const Matrix& candidate, const Matrix& reference,
                              const ScoreParams& params);

// Unweighted mean of several breakdowns, field by field.
ScoreBreakdown mean_breakdown(std::span<const ScoreBreakdown> items);

}  // namespace mshap
