#include "mshap/mshap.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"

namespace mshap {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

TEST(MshapPrime, SingleFeatureByHand) {
  const Vector s = mshap_prime(vec({2}), vec({2}), 1.0, 2.0);
  ASSERT_EQ(s.size(), 1);
  EXPECT_DOUBLE_EQ(s[0], 10.0);
}

TEST(MshapPrime, ZeroRowsGiveZero) {
  const Vector s = mshap_prime(Vector::Zero(4), Vector::Zero(4), 3.0, -2.0);
  EXPECT_EQ(s, Vector::Zero(4));
}

TEST(MshapPrime, LengthMismatchThrows) {
  EXPECT_THROW(mshap_prime(Vector::Zero(3), Vector::Zero(2), 1.0, 1.0), DimensionError);
}

TEST(MshapPrime, MatchesTableExpansionAndSumsToProductGap) {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 500; ++trial) {
    const Index p = 1 + trial % 7;
    const Matrix sx = oracle::random_matrix(gen, p, 1, -5, 5);
    const Matrix sy = oracle::random_matrix(gen, p, 1, -5, 5);
    const double mu_f = u(gen), mu_g = u(gen);
    const Vector s = mshap_prime(Vector(sx.col(0)), Vector(sy.col(0)), mu_f, mu_g);
    const auto want = oracle::expanded_prime(to_std(sx.col(0)), to_std(sy.col(0)), mu_f, mu_g);
    for (Index j = 0; j < p; ++j) EXPECT_LE(oracle::rel_err(s[j], want[static_cast<std::size_t>(j)]), 1e-12);
    const long double x_hat = static_cast<long double>(mu_f) + sx.sum();
    const long double y_hat = static_cast<long double>(mu_g) + sy.sum();
    const double gap = static_cast<double>(x_hat * y_hat - static_cast<long double>(mu_f) * mu_g);
    EXPECT_LE(oracle::rel_err(s.sum(), gap), 1e-12);
  }
}

TEST(MshapPrime, SymmetricInTheTwoParts) {
  std::mt19937_64 gen(102);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int trial = 0; trial < 200; ++trial) {
    const Index p = 1 + trial % 11;
    const Vector sx = oracle::random_matrix(gen, p, 1, -100, 100).col(0);
    const Vector sy = oracle::random_matrix(gen, p, 1, -100, 100).col(0);
    const double mu_f = u(gen), mu_g = u(gen);
    EXPECT_EQ(mshap_prime(sx, sy, mu_f, mu_g), mshap_prime(sy, sx, mu_g, mu_f));
  }
}

TEST(ComputeAlpha, Arithmetic) {
  EXPECT_EQ(compute_alpha(1.0, 2.0, 2.0), 0.0);
  EXPECT_EQ(compute_alpha(2.0, 3.0, 5.0), 1.0);
}

TEST(ComputeAlpha, IsNegativeCovarianceOfPredictions) {
  std::mt19937_64 gen(103);
  const Matrix xy = oracle::random_matrix(gen, 300, 2, -3, 7);
  const Vector x = xy.col(0), y = xy.col(1);
  const double mu_f = x.mean(), mu_g = y.mean();
  const double mu_h = mean_product_baseline(x, y);
  long double cov = 0.0L;
  for (Index i = 0; i < x.size(); ++i) cov += (static_cast<long double>(x[i]) - mu_f) * (y[i] - mu_g);
  cov /= static_cast<long double>(x.size());
  EXPECT_NEAR(compute_alpha(mu_f, mu_g, mu_h), -static_cast<double>(cov), 1e-12);
}

TEST(MeanProductBaseline, Examples) {
  EXPECT_EQ(mean_product_baseline(vec({1, 1}), vec({1, 1})), 1.0);
  EXPECT_EQ(mean_product_baseline(vec({1, 3}), vec({2, 4})), 7.0);
  EXPECT_THROW(mean_product_baseline(vec({1, 3}), vec({2})), DimensionError);
}

TEST(MeanProductBaseline, EqualsBaselineOfProductModel) {
  std::mt19937_64 gen(104);
  const Model f(2, [](std::span<const double> x) { return 1.0 + x[0] - 0.5 * x[1]; });
  const Model g(2, [](std::span<const double> x) { return 2.0 + x[0] * x[1]; });
  const Model h(2, [&](std::span<const double> x) { return f(x) * g(x); });
  const Matrix rows = oracle::random_matrix(gen, 50, 2, -1, 1);
  Vector pf(50), pg(50);
  for (Index i = 0; i < 50; ++i) {
    pf[i] = f(std::span<const double>(rows.row(i).data(), 2));
    pg[i] = g(std::span<const double>(rows.row(i).data(), 2));
  }
  EXPECT_NEAR(mean_product_baseline(pf, pg), baseline(h, BackgroundSet(rows)), 1e-14);
}

TEST(DistributeAlpha, ZeroAlphaLeavesPrimeUntouched) {
  const Vector s = vec({3.0, -1.0, 0.5});
  for (AlphaMethod m : kAllAlphaMethods) {
    const auto row = distribute_alpha(s, 0.0, m, 12.5, 10.0);
    EXPECT_EQ(row.values, s) << to_string(m);
  }
}

TEST(DistributeAlpha, HandEvaluatedWeights) {
  // s' = (3, 1), z_hat - mu_f mu_g = 4, alpha = 4.
  EXPECT_EQ(distribute_alpha(vec({3, 1}), 4.0, AlphaMethod::Uniform, 14.0, 10.0).values, vec({5, 3}));
  EXPECT_EQ(distribute_alpha(vec({3, 1}), 4.0, AlphaMethod::RawWeights, 14.0, 10.0).values, vec({6, 2}));
  const Vector sq = distribute_alpha(vec({3, 1}), 4.0, AlphaMethod::SquaredWeights, 14.0, 10.0).values;
  EXPECT_DOUBLE_EQ(sq[0], 3.0 + 0.9 * 4.0);
  EXPECT_DOUBLE_EQ(sq[1], 1.0 + 0.1 * 4.0);
  // s' = (3, -1): absolute weights (3/4, 1/4).
  EXPECT_EQ(distribute_alpha(vec({3, -1}), 4.0, AlphaMethod::AbsoluteWeights, 12.0, 10.0).values,
            vec({6, 0}));
}

TEST(DistributeAlpha, DegenerateRowsFallBackToUniform) {
  const Vector zero = Vector::Zero(4);
  for (AlphaMethod m : {AlphaMethod::RawWeights, AlphaMethod::AbsoluteWeights, AlphaMethod::SquaredWeights}) {
    const auto row = distribute_alpha(zero, 2.0, m, 5.0, 5.0);
    EXPECT_TRUE(row.fallback) << to_string(m);
    EXPECT_EQ(row.values, Vector::Constant(4, 0.5));
  }
  EXPECT_FALSE(distribute_alpha(zero, 2.0, AlphaMethod::Uniform, 5.0, 5.0).fallback);
  // Raw degenerates on a cancelling row that Absolute handles.
  const Vector cancel = vec({2.0, -2.0});
  EXPECT_TRUE(distribute_alpha(cancel, 1.0, AlphaMethod::RawWeights, 3.0, 3.0).fallback);
  EXPECT_FALSE(distribute_alpha(cancel, 1.0, AlphaMethod::AbsoluteWeights, 3.0, 3.0).fallback);
}

TEST(DistributeAlpha, InconsistentTotalIsRejected) {
  EXPECT_THROW(distribute_alpha(vec({3, 1}), 4.0, AlphaMethod::Uniform, 20.0, 10.0), InvalidInputError);
}

TEST(DistributeAlpha, WeightsSumToOne) {
  std::mt19937_64 gen(105);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 2000; ++trial) {
    const Index p = 1 + trial % 20;
    const Vector s = oracle::random_matrix(gen, p, 1, -1e3, 1e3).col(0);
    const double mfmg = u(gen);
    const double z_hat = s.sum() + mfmg;
    for (AlphaMethod m : kAllAlphaMethods) {
      const auto w = alpha_weights(s, m, z_hat, mfmg);
      if (!w.fallback) EXPECT_NEAR(w.weights.sum(), 1.0, 1e-12) << to_string(m);
    }
  }
}

ShapExplanation random_part(std::mt19937_64& gen, Index n, Index p, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return oracle::explanation_from(oracle::random_matrix(gen, n, p, lo, hi), u(gen));
}

TEST(Combine, SingleFeatureIsForced) {
  std::mt19937_64 gen(106);
  const ShapExplanation f = random_part(gen, 20, 1, -3, 3);
  const ShapExplanation g = random_part(gen, 20, 1, -3, 3);
  const double mu_h = 1.25;
  for (AlphaMethod m : kAllAlphaMethods) {
    const MshapExplanation z = combine(f, g, mu_h, m);
    for (Index i = 0; i < 20; ++i) {
      const double want = f.predictions[i] * g.predictions[i] - mu_h;
      EXPECT_LE(oracle::rel_err(z.values(i, 0), want), 1e-12) << to_string(m);
    }
  }
}

TEST(Combine, MultiplyingByConstantOneIsIdentity) {
  std::mt19937_64 gen(107);
  const ShapExplanation f = random_part(gen, 30, 4, -3, 3);
  const ShapExplanation g = oracle::explanation_from(Matrix::Zero(30, 4), 1.0);
  for (AlphaMethod m : kAllAlphaMethods) {
    const MshapExplanation z = combine(f, g, f.baseline, m);
    EXPECT_EQ(z.alpha, 0.0);
    EXPECT_EQ(z.values, f.values) << to_string(m);
  }
}

TEST(Combine, TightWhenProductIsNearZero) {
  // First part predicts almost exactly zero, so z_hat is tiny while s' has
  // entries of order 1e7 and the plain sum loses ~1e-9 to rounding.
  std::mt19937_64 gen(112);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix sx = oracle::random_matrix(gen, 1, 12, -1e3, 1e3);
    const double mu_f = 700.0;
    sx(0, 11) = -(mu_f + sx.leftCols(11).sum());
    const ShapExplanation f = oracle::explanation_from(sx, mu_f);
    const ShapExplanation g = oracle::explanation_from(oracle::random_matrix(gen, 1, 12, -1e3, 1e3), -900.0);
    for (AlphaMethod m : kAllAlphaMethods) {
      const MshapExplanation z = combine(f, g, 3.5e5, m);
      const long double total =
          static_cast<long double>(z.mu_h) + z.values.cast<long double>().sum();
      // Best possible is one ulp of the smallest nonzero entry; residuals
      // under the closing threshold are left alone.
      double smallest = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < 12; ++j) {
        if (z.values(0, j) != 0.0) smallest = std::min(smallest, std::abs(z.values(0, j)));
      }
      const double ulp = std::nextafter(smallest, HUGE_VAL) - smallest;
      const double bound = std::max(ulp, kResidualCloseRel * std::max(1.0, std::abs(z.predictions[0])));
      EXPECT_LE(std::abs(static_cast<long double>(z.predictions[0]) - total), bound) << to_string(m);
    }
  }
}

TEST(Combine, ZeroAttributionsStayZero) {
  Matrix sx(1, 3), sy(1, 3);
  sx << 2, 0, -1;
  sy << 1, 0, 3;
  const MshapExplanation z =
      combine(oracle::explanation_from(sx, 1.0), oracle::explanation_from(sy, 2.0), 1.7, AlphaMethod::AbsoluteWeights);
  EXPECT_EQ(z.values(0, 1), 0.0);
}

TEST(Combine, LocallyAccurateForEveryMethod) {
  std::mt19937_64 gen(108);
  const ShapExplanation f = random_part(gen, 100, 3, -10, 10);
  const ShapExplanation g = random_part(gen, 100, 3, -10, 10);
  const double mu_h = mean_product_baseline(f.predictions, g.predictions);
  for (AlphaMethod m : kAllAlphaMethods) {
    const MshapExplanation z = combine(f, g, mu_h, m);
    EXPECT_TRUE(validate_local_accuracy(z.values, z.mu_h, z.predictions, 1e-9).all_passed());
    EXPECT_DOUBLE_EQ(z.alpha, f.baseline * g.baseline - mu_h);
  }
}

TEST(Combine, TotalsAgreeAcrossMethods) {
  std::mt19937_64 gen(109);
  const ShapExplanation f = random_part(gen, 60, 6, -50, 50);
  const ShapExplanation g = random_part(gen, 60, 6, -50, 50);
  std::vector<MshapExplanation> zs;
  for (AlphaMethod m : kAllAlphaMethods) zs.push_back(combine(f, g, 3.0, m));
  for (Index i = 0; i < 60; ++i) {
    const double base = compensated_sum(zs[0].values.row(i));
    for (const auto& z : zs) {
      EXPECT_LE(std::abs(compensated_sum(z.values.row(i)) - base), 1e-12 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST(Combine, ScaleCovariance) {
  std::mt19937_64 gen(110);
  const ShapExplanation f = random_part(gen, 40, 5, -5, 5);
  const ShapExplanation g = random_part(gen, 40, 5, -5, 5);
  const double mu_h = 0.75;
  for (double c : {4.0, 0.5, 3.7}) {
    ShapExplanation gc = g;
    gc.values *= c;
    gc.baseline *= c;
    gc.predictions *= c;
    for (AlphaMethod m : kAllAlphaMethods) {
      const MshapExplanation z = combine(f, g, mu_h, m);
      const MshapExplanation zc = combine(f, gc, c * mu_h, m);
      if (c == 4.0 || c == 0.5) {
        EXPECT_EQ(zc.values, (c * z.values).eval()) << to_string(m);
      } else {
        for (Index i = 0; i < 40; ++i) {
          const double scale = std::max(1.0, zc.values.row(i).cwiseAbs().maxCoeff());
          for (Index j = 0; j < 5; ++j) EXPECT_NEAR(zc.values(i, j), c * z.values(i, j), 1e-12 * scale);
        }
      }
    }
  }
}

TEST(Combine, ShapeAndNameErrors) {
  std::mt19937_64 gen(111);
  const ShapExplanation f = random_part(gen, 5, 3, -1, 1);
  EXPECT_THROW(combine(f, random_part(gen, 4, 3, -1, 1), 0.0, AlphaMethod::Uniform), DimensionError);
  EXPECT_THROW(combine(f, random_part(gen, 5, 2, -1, 1), 0.0, AlphaMethod::Uniform), DimensionError);

  ShapExplanation a = f, b = random_part(gen, 5, 3, -1, 1);
  a.feature_names = {"age", "region", "power"};
  b.feature_names = {"age", "power", "region"};
  try {
    combine(a, b, 0.0, AlphaMethod::Uniform);
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("column 2"), std::string::npos) << e.what();
  }
  b.feature_names.clear();
  EXPECT_EQ(combine(a, b, 0.0, AlphaMethod::Uniform).feature_names, a.feature_names);
}

TEST(Combine, RejectsInaccurateInputNamingTheRow) {
  std::mt19937_64 gen(112);
  ShapExplanation f = random_part(gen, 8, 3, -1, 1);
  const ShapExplanation g = random_part(gen, 8, 3, -1, 1);
  f.values(6, 0) += 0.01;
  try {
    combine(f, g, 0.0, AlphaMethod::AbsoluteWeights);
    FAIL() << "expected InvalidInputError";
  } catch (const InvalidInputError& e) {
    EXPECT_NE(std::string(e.what()).find("row 7"), std::string::npos) << e.what();
  }
}

TEST(Combine, AgreesWithExactShapleyAtOneFeature) {
  std::mt19937_64 gen(113);
  const Model f(1, [](std::span<const double> x) { return 2.0 + x[0]; });
  const Model g(1, [](std::span<const double> x) { return 1.0 - 0.3 * x[0] * x[0]; });
  const Model h(1, [&](std::span<const double> x) { return f(x) * g(x); });
  const BackgroundSet bg(oracle::random_matrix(gen, 12, 1, -2, 2));
  const Matrix x = oracle::random_matrix(gen, 15, 1, -2, 2);
  const ShapExplanation ef = explain_exact(f, x, bg), eg = explain_exact(g, x, bg);
  const ShapExplanation eh = explain_exact(h, x, bg);
  for (AlphaMethod m : kAllAlphaMethods) {
    const MshapExplanation z = combine(ef, eg, eh.baseline, m);
    for (Index i = 0; i < 15; ++i) EXPECT_NEAR(z.values(i, 0), eh.values(i, 0), 1e-12);
  }
}

TEST(LinearCombine, IdentityAndAveraging) {
  std::mt19937_64 gen(114);
  const ShapExplanation a = random_part(gen, 10, 4, -2, 2);
  const std::vector<ShapExplanation> one = {a};
  const std::vector<double> w1 = {1.0};
  const ShapExplanation id = linear_combine(w1, one);
  EXPECT_EQ(id.values, a.values);
  EXPECT_EQ(id.baseline, a.baseline);

  const std::vector<ShapExplanation> two = {a, a};
  const std::vector<double> half = {0.5, 0.5};
  const ShapExplanation avg = linear_combine(half, two);
  EXPECT_EQ(avg.values, a.values);
  EXPECT_EQ(avg.baseline, a.baseline);
  EXPECT_TRUE(validate_local_accuracy(avg, 1e-12).all_passed());
}

TEST(LinearCombine, ShapeMismatch) {
  std::mt19937_64 gen(115);
  const std::vector<ShapExplanation> parts = {random_part(gen, 4, 2, -1, 1), random_part(gen, 4, 3, -1, 1)};
  const std::vector<double> w = {1.0, 1.0};
  EXPECT_THROW(linear_combine(w, parts), DimensionError);
  const std::vector<double> w3 = {1.0, 1.0, 1.0};
  EXPECT_THROW(linear_combine(w3, std::span<const ShapExplanation>(parts.data(), 1)), DimensionError);
}

TEST(LinearCombine, ExpectedClaimCountAtOneFeature) {
  // Four class probabilities over one covariate; the expected count is
  // sum_k k * P_k. At p = 1 its attribution is forced, so combining the
  // class explanations must reproduce the direct explanation.
  std::mt19937_64 gen(116);
  const std::array<double, 4> bias = {1.0, 0.6, 0.3, 0.1};
  std::vector<Model> classes;
  for (std::size_t k = 0; k < 4; ++k) {
    classes.emplace_back(1, [k, bias](std::span<const double> x) {
      double total = 0.0;
      for (double b : bias) total += std::exp(b * x[0]);
      return std::exp(bias[k] * x[0]) / total;
    });
  }
  const Model expected_count(1, [&](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += static_cast<double>(k) * classes[k](x);
    return s;
  });
  const BackgroundSet bg(oracle::random_matrix(gen, 20, 1, -3, 3));
  const Matrix x = oracle::random_matrix(gen, 10, 1, -3, 3);
  std::vector<ShapExplanation> parts;
  for (const Model& m : classes) parts.push_back(explain_exact(m, x, bg));
  const std::vector<double> w = {0.0, 1.0, 2.0, 3.0};
  const ShapExplanation combined = linear_combine(w, parts);
  const ShapExplanation direct = explain_exact(expected_count, x, bg);
  EXPECT_NEAR(combined.baseline, direct.baseline, 1e-12);
  for (Index i = 0; i < 10; ++i) EXPECT_NEAR(combined.values(i, 0), direct.values(i, 0), 1e-12);
}

TEST(AlphaMethodNames, RoundTrip) {
  for (AlphaMethod m : kAllAlphaMethods) EXPECT_EQ(parse_alpha_method(to_string(m)), m);
  EXPECT_THROW(parse_alpha_method("median"), ParseError);
}

}  // namespace
}  // namespace mshap
