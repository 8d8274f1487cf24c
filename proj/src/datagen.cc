#include "ldpsurvey/datagen.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {

double CovariateDist::draw(RandomStream& rng) const {
  switch (kind) {
    case Kind::StandardNormal:
      return rng.standard_normal();
    case Kind::Uniform:
      return rng.uniform(-zeta, zeta);
    case Kind::ClippedNormal:
      return std::clamp(rng.standard_normal(), -zeta, zeta);
  }
  return 0.0;
}

double RegNoiseDist::draw(RandomStream& rng) const {
  if (kind == Kind::Gaussian) return std::sqrt(variance) * rng.standard_normal();
  return rng.laplace(std::sqrt(variance / 2.0));
}

LinearModelSource::LinearModelSource(CoefficientVector theta,
                                     CovariateDist covariates, RegNoiseDist noise)
    : theta_(std::move(theta)), covariates_(covariates), noise_(noise) {
  if (theta_.size() == 0) throw StructuralError("linear model needs d >= 1");
  require_finite(theta_, "model coefficients");
}

std::vector<DataPoint> LinearModelSource::draw(std::size_t t, const RngSpec& rng) {
  std::vector<DataPoint> out;
  out.reserve(t);
  for (std::size_t i = 0; i < t; ++i) {
    RandomStream row(rng.derive(drawn_++));
    DataPoint p;
    p.x.resize(theta_.size());
    for (Eigen::Index c = 0; c < theta_.size(); ++c) p.x[c] = covariates_.draw(row);
    p.y = theta_.dot(p.x) + noise_.draw(row);
    out.push_back(std::move(p));
  }
  return out;
}

void GeneratorSpec::check() const {
  if (d == 0) throw PreconditionError("generator dimension must be at least 1");
  if (kind == Kind::LinearCustom) {
    if (static_cast<std::size_t>(theta.size()) != d) {
      throw PreconditionError("custom generator theta does not have dimension d");
    }
    if (!(reg_noise.variance >= 0.0)) {
      throw PreconditionError("regression-noise variance must be non-negative");
    }
    if (covariates.kind != CovariateDist::Kind::StandardNormal &&
        !(covariates.zeta > 0.0)) {
      throw PreconditionError("covariate half-width must be positive");
    }
  }
}

ModelBounds synthetic1_envelope(std::size_t d) {
  const double dd = static_cast<double>(d);
  const double sd_coef = std::sqrt(kSynthetic1CoefVariance);
  const double tau = 4.0 * std::sqrt(dd * kSynthetic1CoefVariance +
                                     kSynthetic1NoiseVariance);
  // |N(0, s^2)| has mean s sqrt(2/pi) and variance s^2 (1 - 2/pi).
  const double l1_mean = dd * sd_coef * std::sqrt(2.0 / std::numbers::pi);
  const double l1_sd = std::sqrt(dd * kSynthetic1CoefVariance *
                                 (1.0 - 2.0 / std::numbers::pi));
  return ModelBounds(4.0, tau, l1_mean + 4.0 * l1_sd);
}

namespace {

CoefficientVector normal_coefficients(std::size_t d, double mean,
                                      double variance, const RngSpec& rng) {
  RandomStream stream(rng);
  CoefficientVector theta(static_cast<Eigen::Index>(d));
  for (auto& v : theta) v = stream.normal(mean, std::sqrt(variance));
  return theta;
}

}  // namespace

Synthetic1 gen_synthetic1(std::size_t d, std::size_t m_survey, double mu,
                          const RngSpec& rng) {
  if (d == 0) throw PreconditionError("gen_synthetic1: d must be at least 1");
  if (m_survey == 0) throw PreconditionError("gen_synthetic1: m_survey must be at least 1");
  CoefficientVector theta_s = normal_coefficients(d, 0.0, kSynthetic1CoefVariance,
                                                  rng.derive(0));
  CoefficientVector theta_star = normal_coefficients(d, mu, kSynthetic1CoefVariance,
                                                     rng.derive(1));
  const CovariateDist covariates{CovariateDist::Kind::StandardNormal, 1.0};
  const RegNoiseDist noise{RegNoiseDist::Kind::Gaussian, kSynthetic1NoiseVariance};

  LinearModelSource survey_model(theta_s, covariates, noise);
  const std::vector<DataPoint> rows = survey_model.draw(m_survey, rng.derive(2));

  return Synthetic1{Dataset(rows, d, synthetic1_envelope(d)), std::move(theta_s),
                    theta_star, LinearModelSource(theta_star, covariates, noise)};
}

CoefficientVector sparse_coefficients(std::size_t d, const RngSpec& rng,
                                      bool require_nonzero) {
  if (d == 0) throw PreconditionError("sparse_coefficients: d must be at least 1");
  const double p = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::uint64_t attempt = 0;; ++attempt) {
    RandomStream stream(attempt == 0 ? rng : rng.derive(attempt));
    CoefficientVector theta(static_cast<Eigen::Index>(d));
    for (auto& v : theta) {
      const bool on = stream.bernoulli(p);
      const double value = stream.uniform(1.0, 10.0);
      v = on ? value : 0.0;
    }
    if (!require_nonzero || !theta.isZero(0.0)) return theta;
  }
}

Synthetic2 gen_synthetic2(std::size_t d, std::size_t m, NoiseSpec::Kind noise_kind,
                          const RngSpec& rng, bool require_nonzero) {
  if (d == 0 || m == 0) throw PreconditionError("gen_synthetic2: d and m must be positive");
  CoefficientVector theta = sparse_coefficients(d, rng.derive(0), require_nonzero);

  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(d);
  Matrix x(rows, cols);
  Vector y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    RandomStream row(rng.derive(1).derive(static_cast<std::uint64_t>(r)));
    for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = row.standard_normal();
    y[r] = theta.dot(x.row(r)) + row.standard_normal();
  }

  const NoiseSpec noise = noise_kind == NoiseSpec::Kind::Gaussian
                              ? NoiseSpec::gaussian(1.0)
                              : NoiseSpec::laplace(1.0 / std::sqrt(2.0));
  const RngSpec noise_rng = rng.derive(2);
  PrivateDataset noisy;
  noisy.z.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    RandomStream row(noise_rng.derive(static_cast<std::uint64_t>(r)));
    for (Eigen::Index c = 0; c < cols; ++c) {
      noisy.z(r, c) = x(r, c) + noise.draw(row.uniform());
    }
  }
  noisy.y = y;
  noisy.sigma_w_diagonal = noise.per_coordinate_variance;
  noisy.noise = noise;
  noisy.rng = noise_rng;

  const double tau = 4.0 * std::sqrt(theta.squaredNorm() + 1.0);
  const double radius = theta.isZero(0.0) ? 1.0 : theta.lpNorm<1>();
  return Synthetic2{Dataset(x, y, ModelBounds(4.0, tau, radius)), std::move(noisy),
                    std::move(theta)};
}

std::size_t ClipReport::total() const {
  std::size_t sum = 0;
  for (auto c : per_column) sum += c;
  return sum;
}

std::pair<Dataset, ClipReport> clip_to_bounds(const Dataset& ds, double zeta,
                                              double tau) {
  if (!(zeta > 0.0) || !(tau > 0.0)) {
    throw PreconditionError("clip_to_bounds: zeta and tau must be positive");
  }
  const std::size_t d = ds.dim();
  ClipReport report;
  report.per_column.assign(d + 1, 0);
  std::vector<double> x = ds.covariates_row_major();
  std::vector<double> y = ds.responses();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double clamped = std::clamp(x[i], -zeta, zeta);
    if (clamped != x[i]) {
      ++report.per_column[i % d];
      x[i] = clamped;
    }
  }
  for (double& v : y) {
    const double clamped = std::clamp(v, -tau, tau);
    if (clamped != v) {
      ++report.per_column[d];
      v = clamped;
    }
  }
  return {Dataset(d, std::move(x), std::move(y),
                  ModelBounds(zeta, tau, ds.bounds().radius())),
          std::move(report)};
}

BoundedSparse gen_bounded_sparse(std::size_t d, std::size_t m, double zeta,
                                 const RngSpec& rng) {
  if (d == 0 || m == 0) throw PreconditionError("gen_bounded_sparse: d and m must be positive");
  if (!(zeta > 0.0)) throw PreconditionError("gen_bounded_sparse: zeta must be positive");
  CoefficientVector theta = sparse_coefficients(d, rng.derive(0), true);
  LinearModelSource model(theta, CovariateDist{CovariateDist::Kind::Uniform, zeta},
                          RegNoiseDist{RegNoiseDist::Kind::Gaussian, 1.0});
  const std::vector<DataPoint> rows = model.draw(m, rng.derive(1));
  const double l1 = theta.lpNorm<1>();
  const ModelBounds bounds(zeta, l1 * zeta + 6.0, l1);
  auto [clipped, report] = clip_to_bounds(Dataset(rows, d, bounds), zeta, bounds.tau());
  validate_dataset(clipped);
  return BoundedSparse{std::move(clipped), std::move(theta), report.per_column[d]};
}

std::string to_string(CovariateDist::Kind kind) {
  switch (kind) {
    case CovariateDist::Kind::StandardNormal:
      return "standard_normal";
    case CovariateDist::Kind::Uniform:
      return "uniform";
    case CovariateDist::Kind::ClippedNormal:
      return "clipped_normal";
  }
  return "standard_normal";
}

std::string to_string(RegNoiseDist::Kind kind) {
  return kind == RegNoiseDist::Kind::Gaussian ? "gaussian" : "laplace";
}

CovariateDist::Kind parse_covariate_kind(const std::string& text) {
  if (text == "standard_normal") return CovariateDist::Kind::StandardNormal;
  if (text == "uniform") return CovariateDist::Kind::Uniform;
  if (text == "clipped_normal") return CovariateDist::Kind::ClippedNormal;
  throw PreconditionError("unknown covariate distribution '" + text + "'");
}

RegNoiseDist::Kind parse_reg_noise_kind(const std::string& text) {
  if (text == "gaussian") return RegNoiseDist::Kind::Gaussian;
  if (text == "laplace") return RegNoiseDist::Kind::Laplace;
  throw PreconditionError("unknown regression-noise distribution '" + text + "'");
}

NoiseSpec::Kind parse_noise_kind(const std::string& text) {
  if (text == "gaussian") return NoiseSpec::Kind::Gaussian;
  if (text == "laplace") return NoiseSpec::Kind::Laplace;
  throw PreconditionError("unknown noise kind '" + text + "'");
}

}  // namespace ldpsurvey
