#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ldpsurvey/core.h"
#include "ldpsurvey/rng.h"

namespace ldpsurvey {

// How neighbouring inputs are defined for sensitivity: one coordinate of the
// record at a time, or the whole covariate vector.
enum class Accounting { PerCoordinate, WholeRecord };

// Variance rule for the Gaussian branch. Standard is the classical Gaussian
// mechanism sigma = Delta_2 sqrt(2 ln(1.25/beta)) / alpha. The two literal
// variants reproduce alternative published calibrations:
//   AlgorithmLiteral: sigma^2 = c zeta / alpha * sqrt(ln(1/beta))
//   ProseLiteral:     sigma^2 = 8 zeta^2 / alpha * ln(1.25/beta)
enum class GaussianVarianceFormula { Standard, AlgorithmLiteral, ProseLiteral };

class PrivacyParams {
 public:
  PrivacyParams(double alpha, double beta,
                Accounting accounting = Accounting::PerCoordinate);

  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  Accounting accounting() const { return accounting_; }
  // beta == 0 selects pure alpha-LDP.
  bool pure() const { return beta_ == 0.0; }

 private:
  double alpha_;
  double beta_;
  Accounting accounting_;
};

struct NoiseSpec {
  enum class Kind { Laplace, Gaussian };

  Kind kind = Kind::Laplace;
  // Laplace scale b, or Gaussian standard deviation sigma.
  double scale = 0.0;
  // 2 b^2 for Laplace, sigma^2 for Gaussian.
  double per_coordinate_variance = 0.0;

  static NoiseSpec laplace(double b);
  static NoiseSpec gaussian(double sigma);
  // Zero noise; privatize then copies covariates verbatim.
  static NoiseSpec degenerate();

  double draw(double u) const;
};

struct NoiseCalibration {
  NoiseSpec spec;
  GaussianVarianceFormula formula = GaussianVarianceFormula::Standard;
  double formula_constant = 1.0;
  std::vector<std::string> warnings;
};

double l1_sensitivity(double zeta, std::size_t d, Accounting accounting);
double l2_sensitivity(double zeta, std::size_t d, Accounting accounting);

// Laplace with b = Delta_1 / alpha when beta == 0, Gaussian otherwise.
// formula_constant is the c of the AlgorithmLiteral Gaussian variant.
NoiseCalibration make_noise_spec(
    const PrivacyParams& params, double zeta, std::size_t d,
    GaussianVarianceFormula formula = GaussianVarianceFormula::Standard,
    double formula_constant = 1.0);

struct PrivateDataset {
  Matrix z;
  Vector y;
  // Sigma_w = sigma_w_diagonal * I_d.
  double sigma_w_diagonal = 0.0;

  NoiseSpec noise;
  std::optional<PrivacyParams> privacy;
  RngSpec rng;

  std::size_t size() const { return static_cast<std::size_t>(z.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(z.cols()); }
  Matrix sigma_w() const;
};

// Adds one independent noise draw to every covariate cell. Row r draws from
// rng.derive(r), so output does not depend on how rows are scheduled.
// Throws PreconditionError when ds is not validated.
PrivateDataset privatize(const Dataset& ds, const NoiseSpec& spec,
                         const std::optional<PrivacyParams>& params,
                         const RngSpec& rng);

std::string to_string(Accounting accounting);
std::string to_string(NoiseSpec::Kind kind);
std::string to_string(GaussianVarianceFormula formula);
Accounting parse_accounting(const std::string& text);
GaussianVarianceFormula parse_gaussian_formula(const std::string& text);

}  // namespace ldpsurvey
