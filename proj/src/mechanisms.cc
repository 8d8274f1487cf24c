#include "ldpsurvey/mechanisms.h"

#include <cmath>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {

PrivacyParams::PrivacyParams(double alpha, double beta, Accounting accounting)
    : alpha_(alpha), beta_(beta), accounting_(accounting) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw PreconditionError("privacy budget alpha must be positive");
  }
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw PreconditionError("failure probability beta must lie in [0, 1)");
  }
}

NoiseSpec NoiseSpec::laplace(double b) {
  return NoiseSpec{Kind::Laplace, b, 2.0 * b * b};
}

NoiseSpec NoiseSpec::gaussian(double sigma) {
  return NoiseSpec{Kind::Gaussian, sigma, sigma * sigma};
}

NoiseSpec NoiseSpec::degenerate() { return NoiseSpec{Kind::Laplace, 0.0, 0.0}; }

double NoiseSpec::draw(double u) const {
  if (scale == 0.0) return 0.0;
  return kind == Kind::Laplace ? laplace_quantile(u, scale)
                               : scale * standard_normal_quantile(u);
}

namespace {

void check_sensitivity_args(double zeta, std::size_t d) {
  if (!(zeta > 0.0)) throw PreconditionError("zeta must be positive");
  if (d == 0) throw PreconditionError("dimension must be at least 1");
}

}  // namespace

double l1_sensitivity(double zeta, std::size_t d, Accounting accounting) {
  check_sensitivity_args(zeta, d);
  const double width = 2.0 * zeta;
  return accounting == Accounting::PerCoordinate
             ? width
             : width * static_cast<double>(d);
}

double l2_sensitivity(double zeta, std::size_t d, Accounting accounting) {
  check_sensitivity_args(zeta, d);
  const double width = 2.0 * zeta;
  return accounting == Accounting::PerCoordinate
             ? width
             : width * std::sqrt(static_cast<double>(d));
}

NoiseCalibration make_noise_spec(const PrivacyParams& params, double zeta,
                                 std::size_t d,
                                 GaussianVarianceFormula formula,
                                 double formula_constant) {
  NoiseCalibration out;
  out.formula = formula;
  out.formula_constant = formula_constant;
  const double alpha = params.alpha();
  if (params.pure()) {
    out.spec = NoiseSpec::laplace(l1_sensitivity(zeta, d, params.accounting()) /
                                  alpha);
    return out;
  }

  const double beta = params.beta();
  if (alpha > 1.0) {
    out.warnings.push_back(
        "alpha > 1 lies outside the classical Gaussian-mechanism validity "
        "region (alpha <= 1)");
  }
  double variance = 0.0;
  switch (formula) {
    case GaussianVarianceFormula::Standard: {
      const double sigma = l2_sensitivity(zeta, d, params.accounting()) *
                           std::sqrt(2.0 * std::log(1.25 / beta)) / alpha;
      variance = sigma * sigma;
      break;
    }
    case GaussianVarianceFormula::AlgorithmLiteral:
      variance = formula_constant * zeta / alpha * std::sqrt(std::log(1.0 / beta));
      break;
    case GaussianVarianceFormula::ProseLiteral:
      variance = 8.0 * zeta * zeta / alpha * std::log(1.25 / beta);
      break;
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw PreconditionError("Gaussian calibration produced variance " +
                            std::to_string(variance));
  }
  out.spec = NoiseSpec::gaussian(std::sqrt(variance));
  return out;
}

Matrix PrivateDataset::sigma_w() const {
  const auto d = static_cast<Eigen::Index>(dim());
  return sigma_w_diagonal * Matrix::Identity(d, d);
}

PrivateDataset privatize(const Dataset& ds, const NoiseSpec& spec,
                         const std::optional<PrivacyParams>& params,
                         const RngSpec& rng) {
  if (!ds.validated()) {
    throw PreconditionError(
        "privatize requires a dataset validated against its bounds");
  }
  PrivateDataset out;
  const auto m = static_cast<Eigen::Index>(ds.size());
  const auto d = static_cast<Eigen::Index>(ds.dim());
  out.z.resize(m, d);
  for (Eigen::Index r = 0; r < m; ++r) {
    RandomStream row_stream(rng.derive(static_cast<std::uint64_t>(r)));
    const auto x = ds.x(static_cast<std::size_t>(r));
    for (Eigen::Index c = 0; c < d; ++c) {
      out.z(r, c) = x[c] + spec.draw(row_stream.uniform());
    }
  }
  out.y = ds.response_vector();
  out.sigma_w_diagonal = spec.per_coordinate_variance;
  out.noise = spec;
  out.privacy = params;
  out.rng = rng;
  return out;
}

std::string to_string(Accounting accounting) {
  return accounting == Accounting::PerCoordinate ? "per-coord" : "whole-record";
}

std::string to_string(NoiseSpec::Kind kind) {
  return kind == NoiseSpec::Kind::Laplace ? "laplace" : "gaussian";
}

std::string to_string(GaussianVarianceFormula formula) {
  switch (formula) {
    case GaussianVarianceFormula::Standard:
      return "standard";
    case GaussianVarianceFormula::AlgorithmLiteral:
      return "algorithm";
    case GaussianVarianceFormula::ProseLiteral:
      return "prose";
  }
  return "standard";
}

Accounting parse_accounting(const std::string& text) {
  if (text == "per-coord") return Accounting::PerCoordinate;
  if (text == "whole-record") return Accounting::WholeRecord;
  throw PreconditionError("unknown accounting mode '" + text + "'");
}

GaussianVarianceFormula parse_gaussian_formula(const std::string& text) {
  if (text == "standard") return GaussianVarianceFormula::Standard;
  if (text == "algorithm") return GaussianVarianceFormula::AlgorithmLiteral;
  if (text == "prose") return GaussianVarianceFormula::ProseLiteral;
  throw PreconditionError("unknown Gaussian variance formula '" + text + "'");
}

}  // namespace ldpsurvey
