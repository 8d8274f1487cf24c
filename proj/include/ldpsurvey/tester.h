#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ldpsurvey/core.h"
#include "ldpsurvey/mechanisms.h"
#include "ldpsurvey/rng.h"
#include "ldpsurvey/solver.h"

namespace ldpsurvey {

// Dimension term of the survey-loss bound: sqrt(2 ln 2d) or sqrt(d + 1).
enum class LossBoundForm { LogD, SqrtDPlus1 };

struct TestConfig {
  ModelBounds bounds;
  // Acceptance parameter kappa >= 0.
  double kappa = 0.0;
  // Rejection tolerance in (0, 1].
  double tol = 0.1;
  // Confidence delta in (0, 1].
  double delta = 0.1;
  LossBoundForm loss_bound_form = LossBoundForm::LogD;
  // Named bound constants; "c2" and "c_eps" are read, default 1.0.
  std::map<std::string, double> constants;

  explicit TestConfig(ModelBounds b) : bounds(b) {}
  double constant(const std::string& name) const;
  void check() const;
};

// Sampling access to the reference population.
class ValidationSource {
 public:
  virtual ~ValidationSource() = default;

  // Samples left to draw; nullopt when the source never runs dry.
  virtual std::optional<std::size_t> available() const = 0;
  // Draws t points; throws InsufficientValidationError when fewer remain.
  virtual std::vector<DataPoint> draw(std::size_t t, const RngSpec& rng) = 0;
};

// Hands out the rows of a fixed dataset in file order.
class ReplaySource : public ValidationSource {
 public:
  explicit ReplaySource(std::vector<DataPoint> rows);
  explicit ReplaySource(const Dataset& ds);

  std::optional<std::size_t> available() const override;
  std::vector<DataPoint> draw(std::size_t t, const RngSpec& rng) override;

 private:
  std::vector<DataPoint> rows_;
  std::size_t cursor_ = 0;
};

enum class Decision { Accept, Reject };

struct Verdict {
  Decision decision = Decision::Accept;
  std::size_t t_used = 0;
  double l_hat = 0.0;
  double gamma_s = 0.0;
  double gamma_d = 0.0;
  double j_hat = 0.0;
  CoefficientVector theta_hat;
  // sqrt(gamma_d) - sqrt(gamma_s) - kappa - tol; REJECT iff positive.
  double margin = 0.0;

  LossBoundForm loss_bound_form = LossBoundForm::LogD;
  std::map<std::string, double> constants_used;
  std::optional<double> lambda_min;
  bool lambda_min_estimated = false;
  int solver_iterations = 0;
  bool solver_converged = false;
  // Validation responses outside [-tau, tau].
  std::size_t validation_out_of_range = 0;
  std::vector<std::string> warnings;
};

// ceil(tau^2 ln(4/delta) / (2 tol^2)).
std::size_t validation_sample_size(double tau, double delta, double tol);

// l_hat + 8 tau zeta R^2 D / sqrt(m) + 3 tau sqrt(ln(4/delta) / (2m)) with
// D = sqrt(2 ln 2d) (LogD) or sqrt(d + 1) (SqrtDPlus1).
double survey_loss_bound(double l_hat, std::size_t m, std::size_t d,
                         const ModelBounds& bounds, double delta,
                         LossBoundForm form);

// Extra slack for (alpha, beta)-LDP surveys:
// 2 c2 zeta^3 / lambda_min * sqrt(ln(1/beta))/alpha * (ln(1/beta)/alpha + 1)
//   * R sqrt(d ln d / m).
double privacy_penalty_gaussian(const ModelBounds& bounds, double alpha,
                                double beta, double lambda_min, double m,
                                std::size_t d, double c2);
// Extra slack for alpha-LDP surveys:
// c2 zeta / lambda_min * max(zeta/alpha, zeta^2, c_eps) * R sqrt(d ln d / m).
double privacy_penalty_laplace(const ModelBounds& bounds, double alpha,
                               double c_eps, double lambda_min, double m,
                               std::size_t d, double c2);

Decision decide(double gamma_d, double gamma_s, double kappa, double tol);
double decision_margin(double gamma_d, double gamma_s, double kappa, double tol);

// Fits on the public survey, bounds its population loss, and compares with
// the loss on fresh validation draws (taken from rng.derive(1)).
Verdict surverify(const Dataset& survey, ValidationSource& source,
                  const TestConfig& cfg, const RngSpec& rng);

struct PrivateTestOptions {
  // Declared lambda_min(Sigma_x). When unset it is estimated from the
  // corrected Gram matrix and floored at lambda_min_floor.
  std::optional<double> lambda_min;
  double lambda_min_floor = 1e-6;
  GaussianVarianceFormula gaussian_formula = GaussianVarianceFormula::Standard;
  double gaussian_formula_constant = 1.0;
  // Replaces the calibrated noise; for degenerate and diagnostic runs.
  std::optional<NoiseSpec> noise_override;
};

// Privatizes the survey (rng.derive(0)), fits on corrected moments, adds the
// matching privacy penalty to the loss bound, then decides as surverify.
Verdict priverify(const Dataset& survey, ValidationSource& source,
                  const TestConfig& cfg, const PrivacyParams& privacy,
                  const PrivateTestOptions& options, const RngSpec& rng);

std::string to_string(Decision decision);
std::string to_string(LossBoundForm form);
LossBoundForm parse_loss_bound_form(const std::string& text);

}  // namespace ldpsurvey
