#include <cmath>
#include <vector>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "ldpsurvey/datagen.h"
#include "ldpsurvey/errors.h"

using namespace ldpsurvey;

namespace {

Vector ols(const Matrix& x, const Vector& y) {
  return x.colPivHouseholderQr().solve(y);
}

Matrix stack_x(const std::vector<DataPoint>& pts) {
  Matrix x(static_cast<Eigen::Index>(pts.size()), pts.front().x.size());
  for (std::size_t i = 0; i < pts.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = pts[i].x;
  return x;
}

Vector stack_y(const std::vector<DataPoint>& pts) {
  Vector y(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) y[static_cast<Eigen::Index>(i)] = pts[i].y;
  return y;
}

// Distance between OLS fits on the survey and on a fresh reference sample,
// evaluated on a third standard-normal design.
double fitted_distance(double mu, std::uint64_t seed, std::size_t m) {
  Synthetic1 data = gen_synthetic1(10, m, mu, RngSpec{seed, 0});
  const Vector a = ols(data.survey.design_matrix(), data.survey.response_vector());
  const auto ref = data.star_sampler.draw(m, RngSpec{seed, 1});
  const Vector b = ols(stack_x(ref), stack_y(ref));
  const auto probe = data.star_sampler.draw(m, RngSpec{seed, 2});
  return model_distance(a, b, stack_x(probe));
}

}  // namespace

TEST(Synthetic1Test, ShapesAndBounds) {
  auto data = gen_synthetic1(4, 1, 0.0, RngSpec{1, 0});
  EXPECT_EQ(data.survey.size(), 1u);
  EXPECT_EQ(data.survey.dim(), 4u);
  EXPECT_EQ(data.theta_s.size(), 4);
  EXPECT_EQ(data.theta_star.size(), 4);
  EXPECT_FALSE(data.survey.validated());
  const ModelBounds env = synthetic1_envelope(4);
  EXPECT_DOUBLE_EQ(env.zeta(), 4.0);
  EXPECT_DOUBLE_EQ(data.survey.bounds().tau(), env.tau());
  EXPECT_THROW(gen_synthetic1(4, 0, 0.0, RngSpec{}), PreconditionError);
}

TEST(Synthetic1Test, Deterministic) {
  auto a = gen_synthetic1(6, 200, 1.0, RngSpec{5, 3});
  auto b = gen_synthetic1(6, 200, 1.0, RngSpec{5, 3});
  EXPECT_EQ(a.survey.covariates_row_major(), b.survey.covariates_row_major());
  EXPECT_EQ(a.survey.responses(), b.survey.responses());
  EXPECT_EQ(a.theta_star, b.theta_star);
  const auto pa = a.star_sampler.draw(10, RngSpec{2, 0});
  const auto pb = b.star_sampler.draw(10, RngSpec{2, 0});
  for (int i = 0; i < 10; ++i) EXPECT_EQ(pa[i].y, pb[i].y);
  auto c = gen_synthetic1(6, 200, 1.0, RngSpec{6, 3});
  EXPECT_NE(a.survey.responses(), c.survey.responses());
}

TEST(Synthetic1Test, CoefficientLaws) {
  // Coefficient variance 0.01 around 0 and around mu.
  double s_sum = 0, s_sq = 0, t_sum = 0;
  const int seeds = 2000;
  const int d = 10;
  for (int s = 0; s < seeds; ++s) {
    auto data = gen_synthetic1(d, 1, 3.0, RngSpec{static_cast<std::uint64_t>(s), 0});
    s_sum += data.theta_s.sum();
    s_sq += data.theta_s.squaredNorm();
    t_sum += data.theta_star.sum();
  }
  const double n = seeds * d;
  EXPECT_NEAR(s_sum / n, 0.0, 0.005);
  EXPECT_NEAR(s_sq / n, 0.01, 0.0005);
  EXPECT_NEAR(t_sum / n, 3.0, 0.005);
}

TEST(Synthetic1Test, ResidualVariance) {
  auto data = gen_synthetic1(5, 200000, 0.0, RngSpec{9, 0});
  const Vector r = data.survey.response_vector() - data.survey.design_matrix() * data.theta_s;
  EXPECT_NEAR(r.squaredNorm() / r.size(), 0.1, 0.002);
}

TEST(Synthetic1Test, CloseRegimeDistance) {
  // With both coefficient vectors drawn at variance 0.01 and standard-normal
  // covariates, the distance is about sqrt(0.02 chi2_10): mean 0.436.
  double total = 0;
  int below_one = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const double dist = fitted_distance(0.0, seed, 20000);
    total += dist;
    if (dist < 1.0) ++below_one;
  }
  EXPECT_NEAR(total / 100, 0.436, 0.04);
  EXPECT_GE(below_one, 99);
}

TEST(Synthetic1Test, FarRegimeDistance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    EXPECT_GT(fitted_distance(2.0, seed, 5000), 4.0);
  }
}

TEST(SparseCoefficientsTest, MeanNonzeros) {
  double nz = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto theta = sparse_coefficients(100, RngSpec{seed, 4});
    for (double v : theta) {
      if (v != 0.0) {
        ++nz;
        EXPECT_GE(v, 1.0);
        EXPECT_LE(v, 10.0);
      }
    }
  }
  EXPECT_NEAR(nz / 1000, 10.0, 1.0);
}

TEST(SparseCoefficientsTest, RequireNonzero) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    EXPECT_GT(sparse_coefficients(1, RngSpec{seed, 0}, true).cwiseAbs().sum(), 0.0);
  }
}

TEST(Synthetic2Test, NoiseBookkeeping) {
  auto g = gen_synthetic2(5, 100, NoiseSpec::Kind::Gaussian, RngSpec{1, 0});
  auto l = gen_synthetic2(5, 100, NoiseSpec::Kind::Laplace, RngSpec{1, 0});
  EXPECT_EQ(g.noisy.sigma_w(), Matrix::Identity(5, 5));
  EXPECT_DOUBLE_EQ(l.noisy.sigma_w_diagonal, 1.0);
  EXPECT_NEAR(l.noisy.noise.scale, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(l.noisy.noise.per_coordinate_variance, 1.0);
  EXPECT_EQ(g.clean.covariates_row_major(), l.clean.covariates_row_major());
  EXPECT_EQ(g.theta_star, l.theta_star);
  EXPECT_EQ(g.noisy.y, l.noisy.y);
}

TEST(Synthetic2Test, MatchedNoiseVariance) {
  auto g = gen_synthetic2(1, 1000000, NoiseSpec::Kind::Gaussian, RngSpec{3, 0});
  auto l = gen_synthetic2(1, 1000000, NoiseSpec::Kind::Laplace, RngSpec{3, 0});
  auto var = [](const Synthetic2& s) {
    const Vector w = s.noisy.z.col(0) - s.clean.design_matrix().col(0);
    const double mean = w.mean();
    return (w.array() - mean).square().sum() / (w.size() - 1);
  };
  const double vg = var(g);
  const double vl = var(l);
  EXPECT_NEAR(vg, 1.0, 0.01);
  EXPECT_NEAR(vl, 1.0, 0.02);
  EXPECT_NEAR(vg / vl, 1.0, 0.02);
}

TEST(ClipTest, Examples) {
  Dataset inside(2, {0.5, -0.5, 1.0, -1.0}, {0.1, 0.2}, ModelBounds(1, 1, 1));
  auto [same, r0] = clip_to_bounds(inside, 1.0, 1.0);
  EXPECT_EQ(same.covariates_row_major(), inside.covariates_row_major());
  EXPECT_EQ(r0.total(), 0u);

  Dataset one(1, {5.0}, {0.0}, ModelBounds(10, 10, 10));
  auto [clipped, r1] = clip_to_bounds(one, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(clipped.x(0, 0), 1.0);
  EXPECT_EQ(r1.total(), 1u);
  EXPECT_EQ(r1.per_column.size(), 2u);
  EXPECT_EQ(r1.per_column[0], 1u);
  EXPECT_DOUBLE_EQ(clipped.bounds().zeta(), 1.0);
  EXPECT_FALSE(clipped.validated());
  EXPECT_THROW(clip_to_bounds(one, 0.0, 1.0), PreconditionError);
}

TEST(ClipTest, Idempotent) {
  auto data = gen_synthetic1(5, 500, 2.0, RngSpec{4, 0});
  auto [once, r1] = clip_to_bounds(data.survey, 1.0, 2.0);
  auto [twice, r2] = clip_to_bounds(once, 1.0, 2.0);
  EXPECT_GT(r1.total(), 0u);
  EXPECT_EQ(r2.total(), 0u);
  EXPECT_EQ(once.covariates_row_major(), twice.covariates_row_major());
  EXPECT_EQ(once.responses(), twice.responses());
}

TEST(ClipTest, NormalTailFraction) {
  // 2 * Phi-bar(4) = 6.334e-5 per cell.
  std::size_t clamps = 0;
  const int reps = 20;
  for (int s = 0; s < reps; ++s) {
    auto data = gen_synthetic1(10, 10000, 0.0, RngSpec{static_cast<std::uint64_t>(s), 0});
    auto [_, report] = clip_to_bounds(data.survey, 4.0, 1e9);
    for (std::size_t c = 0; c < 10; ++c) clamps += report.per_column[c];
  }
  const double cells = reps * 1e5;
  const double expected = 6.334e-5 * cells;
  EXPECT_NEAR(static_cast<double>(clamps), expected, 4 * std::sqrt(expected));
}

TEST(BoundedSparseTest, Validated) {
  auto b = gen_bounded_sparse(10, 500, 1.0, RngSpec{2, 0});
  EXPECT_TRUE(b.survey.validated());
  EXPECT_DOUBLE_EQ(b.survey.bounds().radius(), b.theta_star.lpNorm<1>());
  EXPECT_DOUBLE_EQ(b.survey.bounds().tau(), b.theta_star.lpNorm<1>() + 6.0);
  EXPECT_GT(b.theta_star.lpNorm<1>(), 0.0);
}

TEST(LinearModelSourceTest, ContinuesSequence) {
  LinearModelSource src(Vector::Ones(2), CovariateDist{}, RegNoiseDist{});
  const auto a = src.draw(3, RngSpec{7, 0});
  const auto b = src.draw(3, RngSpec{7, 0});
  LinearModelSource fresh(Vector::Ones(2), CovariateDist{}, RegNoiseDist{});
  const auto all = fresh.draw(6, RngSpec{7, 0});
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].y, all[i].y);
    EXPECT_EQ(b[i].y, all[i + 3].y);
  }
}

TEST(DatagenStringsTest, RoundTrip) {
  EXPECT_EQ(parse_covariate_kind(to_string(CovariateDist::Kind::Uniform)),
            CovariateDist::Kind::Uniform);
  EXPECT_EQ(parse_reg_noise_kind(to_string(RegNoiseDist::Kind::Laplace)),
            RegNoiseDist::Kind::Laplace);
  EXPECT_EQ(parse_noise_kind("laplace"), NoiseSpec::Kind::Laplace);
  EXPECT_THROW(parse_noise_kind("cauchy"), PreconditionError);
}
