#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "ldpsurvey/core.h"
#include "ldpsurvey/errors.h"
#include "ldpsurvey/rng.h"

using namespace ldpsurvey;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

Dataset one_dim(std::vector<std::pair<double, double>> rows, double zeta = 1.0,
                double tau = 1.0) {
  std::vector<double> x, y;
  for (auto [a, b] : rows) {
    x.push_back(a);
    y.push_back(b);
  }
  return Dataset(1, x, y, ModelBounds(zeta, tau, 1.0));
}

}  // namespace

TEST(ModelBoundsTest, RejectsNonPositive) {
  EXPECT_THROW(ModelBounds(0.0, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(ModelBounds(1.0, -1.0, 1.0), PreconditionError);
  EXPECT_THROW(ModelBounds(1.0, 1.0, std::nan("")), PreconditionError);
  EXPECT_NO_THROW(ModelBounds(0.5, 2.0, 3.0));
}

TEST(DatasetTest, Construction) {
  Dataset ds(2, {1, 2, 3, 4}, {5, 6}, ModelBounds(10, 10, 1));
  EXPECT_EQ(ds.size(), 2u);
  EXPECT_EQ(ds.dim(), 2u);
  EXPECT_DOUBLE_EQ(ds.x(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(ds.y(1), 6.0);
  EXPECT_FALSE(ds.validated());
  EXPECT_EQ(ds.design_matrix().rows(), 2);
  EXPECT_DOUBLE_EQ(ds.response_vector()[0], 5.0);
}

TEST(DatasetTest, RejectsRaggedAndNonFinite) {
  EXPECT_THROW(Dataset(2, {1, 2, 3}, {1, 2}, ModelBounds(1, 1, 1)), StructuralError);
  EXPECT_THROW(Dataset(0, {}, {}, ModelBounds(1, 1, 1)), StructuralError);
  EXPECT_THROW(Dataset(1, {std::nan("")}, {0.0}, ModelBounds(1, 1, 1)), StructuralError);
  EXPECT_THROW(Dataset(1, {0.0}, {std::numeric_limits<double>::infinity()},
                       ModelBounds(1, 1, 1)),
               StructuralError);
  std::vector<DataPoint> pts{{vec({1, 2}), 0.0}, {vec({1}), 0.0}};
  EXPECT_THROW(Dataset(pts, 2, ModelBounds(1, 1, 1)), StructuralError);
}

TEST(ValidateDatasetTest, WithinBounds) {
  Dataset ds = one_dim({{0.5, 0.2}});
  const auto report = validate_dataset(ds);
  EXPECT_TRUE(report.ok());
  EXPECT_TRUE(ds.validated());
}

TEST(ValidateDatasetTest, CovariateViolation) {
  Dataset ds = one_dim({{1.5, 0.2}});
  const auto report = validate_dataset(ds);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.violations[0].row, 0u);
  EXPECT_EQ(report.violations[0].column, 0u);
  EXPECT_EQ(report.violations[0].kind, BoundViolation::Kind::Covariate);
  EXPECT_FALSE(ds.validated());
}

TEST(ValidateDatasetTest, ResponseViolation) {
  Dataset ds(2, {0, 0}, {3.0}, ModelBounds(1, 1, 1));
  const auto report = validate_dataset(ds);
  ASSERT_EQ(report.violations.size(), 1u);
  EXPECT_EQ(report.response_violations(), 1u);
  EXPECT_EQ(report.covariate_violations(), 0u);
  EXPECT_EQ(report.violations[0].column, 2u);
}

TEST(ValidateDatasetTest, BoundaryValuesAreInside) {
  Dataset ds = one_dim({{1.0, -1.0}, {-1.0, 1.0}});
  EXPECT_TRUE(validate_dataset(ds).ok());
}

TEST(ValidateDatasetTest, EmptyIsStructuralError) {
  Dataset ds(1, {}, {}, ModelBounds(1, 1, 1));
  EXPECT_THROW(validate_dataset(ds), StructuralError);
}

TEST(ValidateDatasetTest, Idempotent) {
  Dataset ds = one_dim({{0.5, 0.2}, {2.0, 0.0}, {0.0, -4.0}});
  const auto a = validate_dataset(ds);
  const auto b = validate_dataset(ds);
  ASSERT_EQ(a.violations.size(), b.violations.size());
  for (std::size_t i = 0; i < a.violations.size(); ++i) {
    EXPECT_EQ(a.violations[i].row, b.violations[i].row);
    EXPECT_EQ(a.violations[i].column, b.violations[i].column);
  }
  EXPECT_DOUBLE_EQ(ds.x(1, 0), 2.0);
}

TEST(ValidateDatasetTest, WithBoundsStartsUnvalidated) {
  Dataset ds = one_dim({{0.5, 0.2}});
  validate_dataset(ds);
  const Dataset copy = ds.with_bounds(ModelBounds(0.1, 1, 1));
  EXPECT_FALSE(copy.validated());
  EXPECT_FALSE(check_bounds(copy).ok());
}

TEST(PredictTest, Examples) {
  EXPECT_DOUBLE_EQ(predict(vec({0, 0}), vec({5, 7})), 0.0);
  EXPECT_DOUBLE_EQ(predict(vec({1, 2}), vec({3, 4})), 11.0);
  EXPECT_DOUBLE_EQ(predict(vec({-1}), vec({2})), -2.0);
  EXPECT_THROW(predict(vec({1, 2}), vec({1})), StructuralError);
}

TEST(PredictTest, Linearity) {
  RandomStream rng(RngSpec{11, 0});
  for (int trial = 0; trial < 200; ++trial) {
    Vector t1(5), t2(5), x(5);
    for (int i = 0; i < 5; ++i) {
      t1[i] = rng.normal(0, 3);
      t2[i] = rng.normal(0, 3);
      x[i] = rng.normal(0, 3);
    }
    const double a = rng.uniform(-5, 5);
    const double b = rng.uniform(-5, 5);
    const double lhs = predict(a * t1 + b * t2, x);
    const double rhs = a * predict(t1, x) + b * predict(t2, x);
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)) * 10);
  }
}

TEST(EmpiricalLossTest, Examples) {
  EXPECT_DOUBLE_EQ(empirical_loss(vec({1}), one_dim({{1, 1}, {2, 2}}, 5, 5)), 0.0);
  EXPECT_DOUBLE_EQ(empirical_loss(vec({0}), one_dim({{1, 1}, {1, -1}})), 1.0);
  EXPECT_DOUBLE_EQ(empirical_loss(vec({2}), one_dim({{1, 0}})), 4.0);
}

TEST(EmpiricalLossTest, Errors) {
  EXPECT_THROW(empirical_loss(vec({1}), Dataset(1, {}, {}, ModelBounds(1, 1, 1))),
               StructuralError);
  EXPECT_THROW(empirical_loss(vec({1, 1}), one_dim({{1, 0}})), StructuralError);
}

TEST(EmpiricalLossTest, NonNegativeAndZeroOnlyForExactFit) {
  RandomStream rng(RngSpec{3, 0});
  for (int trial = 0; trial < 100; ++trial) {
    Matrix x(20, 3);
    Vector theta(3);
    for (auto& v : theta) v = rng.normal(0, 1);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal(0, 1);
    Vector y = x * theta;
    EXPECT_NEAR(empirical_loss(theta, x, y), 0.0, 1e-24);
    y[trial % 20] += 0.5;
    EXPECT_GT(empirical_loss(theta, x, y), 0.0);
  }
}

TEST(ModelDistanceTest, Examples) {
  const std::vector<Vector> ones{vec({1}), vec({1}), vec({1})};
  EXPECT_DOUBLE_EQ(model_distance(vec({1}), vec({0}), ones), 1.0);
  EXPECT_DOUBLE_EQ(model_distance(vec({3}), vec({3}), ones), 0.0);
  const std::vector<Vector> basis{vec({1, 0}), vec({0, 1})};
  EXPECT_DOUBLE_EQ(model_distance(vec({1, 0}), vec({0, 1}), basis), 1.0);
  EXPECT_THROW(model_distance(vec({1}), vec({0}), std::vector<Vector>{}), StructuralError);
  EXPECT_THROW(model_distance(vec({1}), vec({0}), Matrix(0, 1)), StructuralError);
}

TEST(ModelDistanceTest, SymmetricAndTriangle) {
  RandomStream rng(RngSpec{5, 0});
  Matrix xs(30, 4);
  for (Eigen::Index i = 0; i < xs.size(); ++i) xs.data()[i] = rng.normal(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    Vector a(4), b(4), c(4);
    for (int i = 0; i < 4; ++i) {
      a[i] = rng.normal(0, 1);
      b[i] = rng.normal(0, 1);
      c[i] = rng.normal(0, 1);
    }
    EXPECT_DOUBLE_EQ(model_distance(a, b, xs), model_distance(b, a, xs));
    EXPECT_LE(model_distance(a, c, xs),
              model_distance(a, b, xs) + model_distance(b, c, xs) + 1e-12);
  }
}

TEST(RngTest, Reproducible) {
  RandomStream a(RngSpec{42, 3});
  RandomStream b(RngSpec{42, 3});
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RngTest, StreamsDiffer) {
  RandomStream a(RngSpec{42, 0});
  RandomStream b(RngSpec{42, 1});
  RandomStream c(RngSpec{43, 0});
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE((RngSpec{1, 0}.derive(0)), (RngSpec{1, 0}.derive(1)));
  EXPECT_EQ((RngSpec{1, 0}.derive(5)), (RngSpec{1, 0}.derive(5)));
}

TEST(RngTest, UniformOpenInterval) {
  RandomStream rng(RngSpec{1, 0});
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(RngTest, NormalMoments) {
  RandomStream rng(RngSpec{2, 0});
  const int n = 400000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.standard_normal();
    s += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(RngTest, QuantileTransforms) {
  EXPECT_NEAR(standard_normal_quantile(0.5), 0.0, 1e-15);
  EXPECT_NEAR(standard_normal_quantile(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(laplace_quantile(0.5, 2.0), 0.0, 1e-15);
  // P(L <= -b ln 2) = 1/4 for Laplace(0, b).
  EXPECT_NEAR(laplace_quantile(0.25, 3.0), -3.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(laplace_quantile(0.75, 3.0), 3.0 * std::log(2.0), 1e-12);
}

TEST(RequireFiniteTest, Throws) {
  EXPECT_NO_THROW(require_finite(vec({1, 2}), "v"));
  EXPECT_THROW(require_finite(vec({1, std::nan("")}), "v"), StructuralError);
}
