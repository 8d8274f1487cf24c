#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ldpsurvey {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Linear model coefficients. Finite entries; the constrained solver keeps
// the l1 norm within the configured radius.
using CoefficientVector = Eigen::VectorXd;

struct DataPoint {
  Vector x;
  double y = 0.0;
};

// Declared bounds: |x_i| <= zeta per coordinate, |y| <= tau, and the l1
// radius of admissible coefficient vectors.
class ModelBounds {
 public:
  ModelBounds(double zeta, double tau, double radius);

  double zeta() const { return zeta_; }
  double tau() const { return tau_; }
  double radius() const { return radius_; }

 private:
  double zeta_;
  double tau_;
  double radius_;
};

struct ValidationReport;

// Survey rows stored row-major with responses in a parallel array. Immutable
// apart from the validation flag, which only validate_dataset sets.
class Dataset {
 public:
  // Throws StructuralError on ragged rows or non-finite values.
  Dataset(std::size_t dim, std::vector<double> covariates_row_major,
          std::vector<double> responses, ModelBounds bounds);
  Dataset(const std::vector<DataPoint>& points, std::size_t dim,
          ModelBounds bounds);
  Dataset(const Matrix& x, const Vector& y, ModelBounds bounds);

  std::size_t size() const { return responses_.size(); }
  std::size_t dim() const { return dim_; }
  const ModelBounds& bounds() const { return bounds_; }
  bool validated() const { return validated_; }

  Eigen::Map<const Vector> x(std::size_t row) const {
    return Eigen::Map<const Vector>(covariates_.data() + row * dim_,
                                    static_cast<Eigen::Index>(dim_));
  }
  double y(std::size_t row) const { return responses_[row]; }
  double x(std::size_t row, std::size_t col) const {
    return covariates_[row * dim_ + col];
  }

  const std::vector<double>& covariates_row_major() const {
    return covariates_;
  }
  const std::vector<double>& responses() const { return responses_; }

  // m x d covariate matrix, materialized on demand.
  Matrix design_matrix() const;
  Vector response_vector() const;

  // Same rows under different bounds; the copy starts unvalidated.
  Dataset with_bounds(const ModelBounds& bounds) const;

 private:
  friend ValidationReport validate_dataset(Dataset& ds);

  std::size_t dim_;
  std::vector<double> covariates_;
  std::vector<double> responses_;
  ModelBounds bounds_;
  bool validated_ = false;
};

struct BoundViolation {
  enum class Kind { Covariate, Response };
  std::size_t row;
  // Covariate index, or dim for the response column.
  std::size_t column;
  double value;
  Kind kind;
};

struct ValidationReport {
  std::vector<BoundViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t covariate_violations() const;
  std::size_t response_violations() const;
};

// Pure check of every cell against the dataset's bounds.
ValidationReport check_bounds(const Dataset& ds);

// check_bounds, then flags the dataset validated iff there are no
// violations. Throws StructuralError on an empty dataset.
ValidationReport validate_dataset(Dataset& ds);

double predict(const CoefficientVector& theta, const Eigen::Ref<const Vector>& x);

// Mean squared residual of theta on the dataset.
double empirical_loss(const CoefficientVector& theta, const Dataset& ds);
double empirical_loss(const CoefficientVector& theta, const Matrix& x,
                      const Vector& y);

// Empirical distributional l2 distance between two linear functions over a
// fixed design: sqrt(mean_i <a - b, x_i>^2). Rows of xs are the points.
double model_distance(const CoefficientVector& theta_a,
                      const CoefficientVector& theta_b, const Matrix& xs);
double model_distance(const CoefficientVector& theta_a,
                      const CoefficientVector& theta_b,
                      const std::vector<Vector>& xs);

void require_finite(const Eigen::Ref<const Vector>& v, const std::string& what);

}  // namespace ldpsurvey
