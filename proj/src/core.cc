#include "ldpsurvey/core.h"

#include <algorithm>
#include <cmath>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {

ModelBounds::ModelBounds(double zeta, double tau, double radius)
    : zeta_(zeta), tau_(tau), radius_(radius) {
  if (!(zeta > 0.0) || !(tau > 0.0) || !(radius > 0.0)) {
    throw PreconditionError("model bounds must be positive (zeta=" +
                            std::to_string(zeta) + ", tau=" +
                            std::to_string(tau) + ", radius=" +
                            std::to_string(radius) + ")");
  }
}

void require_finite(const Eigen::Ref<const Vector>& v, const std::string& what) {
  if (!v.allFinite()) throw StructuralError(what + " contains NaN or Inf");
}

Dataset::Dataset(std::size_t dim, std::vector<double> covariates_row_major,
                 std::vector<double> responses, ModelBounds bounds)
    : dim_(dim),
      covariates_(std::move(covariates_row_major)),
      responses_(std::move(responses)),
      bounds_(bounds) {
  if (dim_ == 0) throw StructuralError("dataset dimension must be at least 1");
  if (covariates_.size() != responses_.size() * dim_) {
    throw StructuralError("covariate storage does not match " +
                          std::to_string(responses_.size()) + " rows of " +
                          std::to_string(dim_) + " columns");
  }
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    if (!std::isfinite(covariates_[i])) {
      throw StructuralError("non-finite covariate at row " +
                            std::to_string(i / dim_) + ", column " +
                            std::to_string(i % dim_));
    }
  }
  for (std::size_t i = 0; i < responses_.size(); ++i) {
    if (!std::isfinite(responses_[i])) {
      throw StructuralError("non-finite response at row " + std::to_string(i));
    }
  }
}

namespace {

std::vector<double> flatten(const std::vector<DataPoint>& points,
                            std::size_t dim) {
  std::vector<double> out;
  out.reserve(points.size() * dim);
  for (std::size_t r = 0; r < points.size(); ++r) {
    const auto& p = points[r];
    if (static_cast<std::size_t>(p.x.size()) != dim) {
      throw StructuralError("row " + std::to_string(r) + " has dimension " +
                            std::to_string(p.x.size()) + ", expected " +
                            std::to_string(dim));
    }
    out.insert(out.end(), p.x.data(), p.x.data() + p.x.size());
  }
  return out;
}

std::vector<double> responses_of(const std::vector<DataPoint>& points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.y);
  return out;
}

std::vector<double> row_major(const Matrix& x) {
  std::vector<double> out(static_cast<std::size_t>(x.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>>(out.data(), x.rows(), x.cols()) = x;
  return out;
}

}  // namespace

Dataset::Dataset(const std::vector<DataPoint>& points, std::size_t dim,
                 ModelBounds bounds)
    : Dataset(dim, flatten(points, dim), responses_of(points), bounds) {}

Dataset::Dataset(const Matrix& x, const Vector& y, ModelBounds bounds)
    : Dataset(static_cast<std::size_t>(x.cols()), row_major(x),
              std::vector<double>(y.data(), y.data() + y.size()), bounds) {
  if (x.rows() != y.size()) {
    throw StructuralError("covariate rows and response length differ");
  }
}

Matrix Dataset::design_matrix() const {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      covariates_.data(), static_cast<Eigen::Index>(size()),
      static_cast<Eigen::Index>(dim_));
}

Vector Dataset::response_vector() const {
  return Eigen::Map<const Vector>(responses_.data(),
                                  static_cast<Eigen::Index>(size()));
}

Dataset Dataset::with_bounds(const ModelBounds& bounds) const {
  return Dataset(dim_, covariates_, responses_, bounds);
}

std::size_t ValidationReport::covariate_violations() const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [](const auto& v) {
        return v.kind == BoundViolation::Kind::Covariate;
      }));
}

std::size_t ValidationReport::response_violations() const {
  return violations.size() - covariate_violations();
}

ValidationReport check_bounds(const Dataset& ds) {
  if (ds.size() == 0) throw StructuralError("dataset is empty");
  ValidationReport report;
  const double zeta = ds.bounds().zeta();
  const double tau = ds.bounds().tau();
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t c = 0; c < ds.dim(); ++c) {
      const double v = ds.x(r, c);
      if (std::abs(v) > zeta) {
        report.violations.push_back(
            {r, c, v, BoundViolation::Kind::Covariate});
      }
    }
    if (std::abs(ds.y(r)) > tau) {
      report.violations.push_back(
          {r, ds.dim(), ds.y(r), BoundViolation::Kind::Response});
    }
  }
  return report;
}

ValidationReport validate_dataset(Dataset& ds) {
  ValidationReport report = check_bounds(ds);
  ds.validated_ = report.ok();
  return report;
}

double predict(const CoefficientVector& theta,
               const Eigen::Ref<const Vector>& x) {
  if (theta.size() != x.size()) {
    throw StructuralError("predict: coefficient dimension " +
                          std::to_string(theta.size()) +
                          " does not match covariate dimension " +
                          std::to_string(x.size()));
  }
  return theta.dot(x);
}

double empirical_loss(const CoefficientVector& theta, const Dataset& ds) {
  if (ds.size() == 0) throw StructuralError("empirical_loss: empty dataset");
  if (static_cast<std::size_t>(theta.size()) != ds.dim()) {
    throw StructuralError("empirical_loss: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    const double residual = theta.dot(ds.x(r)) - ds.y(r);
    sum += residual * residual;
  }
  return sum / static_cast<double>(ds.size());
}

double empirical_loss(const CoefficientVector& theta, const Matrix& x,
                      const Vector& y) {
  if (x.rows() == 0) throw StructuralError("empirical_loss: empty dataset");
  if (x.cols() != theta.size() || x.rows() != y.size()) {
    throw StructuralError("empirical_loss: dimension mismatch");
  }
  return (x * theta - y).squaredNorm() / static_cast<double>(x.rows());
}

double model_distance(const CoefficientVector& theta_a,
                      const CoefficientVector& theta_b, const Matrix& xs) {
  if (xs.rows() == 0) throw StructuralError("model_distance: no points");
  if (theta_a.size() != theta_b.size() || xs.cols() != theta_a.size()) {
    throw StructuralError("model_distance: dimension mismatch");
  }
  const Vector gaps = xs * (theta_a - theta_b);
  return std::sqrt(gaps.squaredNorm() / static_cast<double>(xs.rows()));
}

double model_distance(const CoefficientVector& theta_a,
                      const CoefficientVector& theta_b,
                      const std::vector<Vector>& xs) {
  if (xs.empty()) throw StructuralError("model_distance: no points");
  if (theta_a.size() != theta_b.size()) {
    throw StructuralError("model_distance: dimension mismatch");
  }
  const Vector diff = theta_a - theta_b;
  double sum = 0.0;
  for (const auto& x : xs) {
    const double gap = predict(diff, x);
    sum += gap * gap;
  }
  return std::sqrt(sum / static_cast<double>(xs.size()));
}

}  // namespace ldpsurvey
