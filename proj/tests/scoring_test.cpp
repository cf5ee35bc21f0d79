#include "mshap/scoring.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "oracles.hpp"

namespace mshap {
namespace {

TEST(Lambda1, SameSignIsPerfect) {
  EXPECT_EQ(lambda1(2.0, 5.0, 1.5), 1.0);
  EXPECT_EQ(lambda1(-2.0, -5.0, 0.1), 1.0);
}

TEST(Lambda1, OppositeSignsDecay) {
  EXPECT_DOUBLE_EQ(lambda1(1.0, -1.0, 1.5), (1.0 + 1.5) / (1.0 + 1.0 + 1.5));
  EXPECT_NEAR(lambda1(1.0, -1.0, 1.5), 0.7142857142857143, 1e-15);
}

TEST(Lambda1, ZerosSaturate) {
  EXPECT_EQ(lambda1(0.0, 0.0, 1.5), 1.0);
  EXPECT_EQ(lambda1(0.0, 0.9, 1.5), 1.0);
  EXPECT_LT(lambda1(0.0, 3.0, 1.5), 1.0);
}

TEST(Lambda2, Examples) {
  EXPECT_EQ(lambda2(4.2, 4.2, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(lambda2(10.0, 0.0, 1.0), 2.0 / 11.0);
  EXPECT_EQ(lambda2(3.5, 1.0, 2.5), 1.0);  // |s - k| == theta2
  EXPECT_LT(lambda2(3.5, 1.0, 2.4), 1.0);
}

TEST(ImportanceRanks, Examples) {
  Vector a(3);
  a << 5, -7, 1;
  EXPECT_EQ(importance_ranks(a), (RankVector(3) << 2, 1, 3).finished());
  EXPECT_EQ(importance_ranks(Vector::Zero(2)), (RankVector(2) << 1, 2).finished());
  EXPECT_EQ(importance_ranks(Vector::Constant(1, -3.0)), RankVector::Constant(1, 1));
}

TEST(ImportanceRanks, IsAPermutation) {
  std::mt19937_64 gen(201);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 1 + trial % 15;
    Vector v = oracle::random_matrix(gen, p, 1, -3, 3).col(0);
    if (trial % 3 == 0) v[0] = v[p - 1];  // force ties sometimes
    RankVector r = importance_ranks(v);
    std::sort(r.begin(), r.end());
    for (Index j = 0; j < p; ++j) EXPECT_EQ(r[j], j + 1);
  }
}

TEST(Lambda3, Examples) {
  EXPECT_EQ(lambda3(2, 2), 1.0);
  EXPECT_DOUBLE_EQ(lambda3(1, 3), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(lambda3(1, 2), 0.5);
}

TEST(Beta, Examples) {
  const ScoreParams params{1.5, 1.0};
  EXPECT_EQ(beta(0.7, 0.7, 2, 2, params), 3.0);
  const double want = 2.5 / 3.5 + 2.0 / 3.0 + 1.0;
  EXPECT_DOUBLE_EQ(beta(1.0, -1.0, 1, 1, params), want);
  EXPECT_NEAR(want, 2.380952380952381, 1e-15);
  EXPECT_EQ(beta(2.0, 3.0, 1, 1, params), 3.0);  // k = s + theta2
}

TEST(ScoreParams, MustBePositive) {
  EXPECT_THROW((ScoreParams{0.0, 1.0}.validate()), InvalidInputError);
  EXPECT_THROW((ScoreParams{1.0, -1.0}.validate()), InvalidInputError);
}

TEST(ScoreMatrices, IdenticalScoresThree) {
  std::mt19937_64 gen(202);
  const Matrix a = oracle::random_matrix(gen, 20, 5, -9, 9);
  const ScoreBreakdown s = score_matrices(a, a, {1.5, 1.0});
  EXPECT_EQ(s.score, 3.0);
  EXPECT_EQ(s.pct_same_sign, 1.0);
  EXPECT_EQ(s.pct_same_rank, 1.0);
}

TEST(ScoreMatrices, NegatedHasNoSignAgreement) {
  std::mt19937_64 gen(203);
  const Matrix a = oracle::random_matrix(gen, 20, 5, 1, 9);
  const ScoreBreakdown s = score_matrices(-a, a, {1.5, 1.0});
  EXPECT_EQ(s.pct_same_sign, 0.0);
  EXPECT_EQ(s.pct_same_rank, 1.0);
}

TEST(ScoreMatrices, ZeroCellsAgreeInSign) {
  const Matrix z = Matrix::Zero(2, 2);
  EXPECT_EQ(score_matrices(z, z, {1.5, 1.0}).pct_same_sign, 1.0);
}

TEST(ScoreMatrices, ShapeMismatch) {
  EXPECT_THROW(score_matrices(Matrix::Zero(2, 3), Matrix::Zero(3, 2), {1.5, 1.0}), DimensionError);
}

TEST(ScoreMatrices, MatchesCellwiseBruteForce) {
  std::mt19937_64 gen(204);
  const Matrix a = oracle::random_matrix(gen, 7, 4, -5, 5);
  const Matrix b = oracle::random_matrix(gen, 7, 4, -5, 5);
  const ScoreParams params{2.5, 6.0};
  long double total = 0.0L, sign = 0.0L, rank = 0.0L;
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 4; ++j) {
      // ranks by counting strictly larger magnitudes, ties by index
      int ra = 1, rb = 1;
      for (Index q = 0; q < 4; ++q) {
        if (std::abs(a(i, q)) > std::abs(a(i, j)) || (std::abs(a(i, q)) == std::abs(a(i, j)) && q < j)) ++ra;
        if (std::abs(b(i, q)) > std::abs(b(i, j)) || (std::abs(b(i, q)) == std::abs(b(i, j)) && q < j)) ++rb;
      }
      const double s = a(i, j), k = b(i, j);
      const double l1 = s * k > 0 ? 1.0 : std::min(1.0, (1 + params.theta1) / (std::abs(s) + std::abs(k) + params.theta1));
      const double l2 = std::min(1.0, (1 + params.theta2) / (std::abs(s - k) + 1));
      const double l3 = 1.0 / (std::abs(ra - rb) + 1);
      total += l1 + l2 + l3;
      sign += s * k > 0 ? 1 : 0;
      rank += ra == rb ? 1 : 0;
    }
  }
  const ScoreBreakdown got = score_matrices(a, b, params);
  EXPECT_NEAR(got.score, static_cast<double>(total / 28), 1e-14);
  EXPECT_NEAR(got.pct_same_sign, static_cast<double>(sign / 28), 1e-15);
  EXPECT_NEAR(got.pct_same_rank, static_cast<double>(rank / 28), 1e-15);
}

double draw_extreme(std::mt19937_64& gen) {
  static const double specials[] = {0.0, -0.0, std::numeric_limits<double>::denorm_min(),
                                    -std::numeric_limits<double>::denorm_min(), 1e-310, 1e300,
                                    -1e300, std::numeric_limits<double>::max(),
                                    -std::numeric_limits<double>::max()};
  std::uniform_int_distribution<int> pick(0, 11);
  std::uniform_real_distribution<double> u(-100, 100);
  const int k = pick(gen);
  if (k < 9) return specials[k];
  return u(gen) * std::pow(10.0, static_cast<double>(pick(gen) - 5));
}

TEST(ScoringProperties, RangesHoldForExtremeInputs) {
  std::mt19937_64 gen(205);
  std::uniform_real_distribution<double> theta(0.01, 50);
  for (int trial = 0; trial < 20000; ++trial) {
    const double s = draw_extreme(gen), k = draw_extreme(gen);
    const ScoreParams params{theta(gen), theta(gen)};
    const double l1 = lambda1(s, k, params.theta1);
    const double l2 = lambda2(s, k, params.theta2);
    EXPECT_GT(l1, 0.0);
    EXPECT_LE(l1, 1.0);
    EXPECT_GT(l2, 0.0);
    EXPECT_LE(l2, 1.0);
    const double b = beta(s, k, 1 + trial % 4, 1 + (trial / 4) % 4, params);
    EXPECT_GT(b, 0.0);
    EXPECT_LE(b, 3.0);
  }
}

TEST(ScoringProperties, Lambda2NonIncreasingInGap) {
  std::mt19937_64 gen(206);
  std::uniform_real_distribution<double> u(0, 100);
  for (int trial = 0; trial < 2000; ++trial) {
    const double theta2 = u(gen) + 0.01;
    double g1 = u(gen), g2 = u(gen);
    if (g1 > g2) std::swap(g1, g2);
    EXPECT_GE(lambda2(0.0, g1, theta2), lambda2(0.0, g2, theta2));
  }
}

TEST(ScoringProperties, Lambda1NonDecreasingInTheta) {
  std::mt19937_64 gen(207);
  std::uniform_real_distribution<double> u(-50, 50);
  std::uniform_real_distribution<double> t(0.01, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    const double s = u(gen), k = u(gen);
    double t1 = t(gen), t2 = t(gen);
    if (t1 > t2) std::swap(t1, t2);
    EXPECT_LE(lambda1(s, k, t1), lambda1(s, k, t2));
  }
}

TEST(ScoringProperties, ColumnPermutationInvariantAndDecomposes) {
  std::mt19937_64 gen(208);
  for (int trial = 0; trial < 100; ++trial) {
    const Index p = 2 + trial % 6;
    const Matrix a = oracle::random_matrix(gen, 9, p, -20, 20);
    const Matrix b = oracle::random_matrix(gen, 9, p, -20, 20);
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(p);
    perm.setIdentity();
    std::shuffle(perm.indices().data(), perm.indices().data() + p, gen);
    const ScoreParams params{3.5, 11.0};
    const ScoreBreakdown x = score_matrices(a, b, params);
    const Matrix ap = a * perm, bp = b * perm;
    const ScoreBreakdown y = score_matrices(ap, bp, params);
    EXPECT_NEAR(x.score, y.score, 1e-12);
    EXPECT_NEAR(x.direction_score, y.direction_score, 1e-12);
    EXPECT_NEAR(x.relative_value_score, y.relative_value_score, 1e-12);
    EXPECT_EQ(x.pct_same_sign, y.pct_same_sign);
    EXPECT_NEAR(x.score, x.direction_score + x.relative_value_score + x.rank_score, 1e-12);
  }
}

}  // namespace
}  // namespace mshap
