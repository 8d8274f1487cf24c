#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "ldpsurvey/rng.h"

namespace ldpsurvey::bounds {

// Evaluated bound with its audit trail. Probabilities above 1 are clamped
// and flagged vacuous; side conditions record whether the regime the bound
// was derived under actually holds for the given arguments.
struct BoundResult {
  double value = 0.0;
  bool vacuous = false;
  std::map<std::string, bool> side_conditions;
  std::map<std::string, double> constants_used;

  bool side_conditions_hold() const;
};

// Tail scales: covariates c_x, privatization noise c_w, regression noise
// c_eps, and the subgaussian regression-noise parameter sigma_eps.
struct TailParams {
  double c_x = 1.0;
  double c_w = 1.0;
  double c_eps = 1.0;
  double sigma_eps = 1.0;

  double c_max() const;
  double c_z() const { return c_x + c_w; }
  void check() const;
};

// Smallest eigenvalue of the population covariate covariance.
struct SpectrumInfo {
  double lambda_min = 1.0;
  void check() const;
};

struct LowerREParams {
  double alpha_ell = 0.0;
  double tau_md = 0.0;
  bool feasible = false;
};

// Gamma function; exact factorials for positive integer arguments up to 21.
double gamma_fn(double x);

// Sample counts are real-valued in the evaluators below so that the
// constructed examples (m = d ln d and the like) evaluate exactly.

std::int64_t min_samples_gaussian(const SpectrumInfo& spec, double zeta,
                                  double alpha, double beta, int d,
                                  double c = 1.0);
std::int64_t min_samples_laplace(const SpectrumInfo& spec, double zeta,
                                 double alpha, double c_eps, int d);

// c2 zeta sqrt(ln(1/beta)/alpha + 1) (zeta sqrt(ln(1/beta))/alpha + sigma_eps)
//   / lambda_min * R * sqrt(d ln d / m)
double error_bound_gaussian(const TailParams& params, const SpectrumInfo& spec,
                            double zeta, double alpha, double beta,
                            double radius, int d, double m, double c2 = 1.0);
// c2 / lambda_min * max(zeta/alpha, zeta^2, c_eps) * R * sqrt(d ln d / m)
double error_bound_laplace(const TailParams& params, const SpectrumInfo& spec,
                           double zeta, double alpha, double radius, int d,
                           double m, double c2 = 1.0);

LowerREParams lower_re_params(const SpectrumInfo& spec, double c_max, double m,
                              int d, double c1 = 1.0);

// Three-term right-tail bound for sums of n centered sub-Weibull variables.
BoundResult subweibull_right_tail(double n, double t, double alpha_shape,
                                  double c_alpha, double sigma_minus_sq,
                                  double beta_split = 0.5);
double subweibull_c1(double alpha_shape, double c_alpha, double beta_split);
double subweibull_c2(double alpha_shape, double c_alpha, double beta_split);

// exp(-c n t^2 / c_x^2) for the mean of centered squares.
BoundResult squared_subexp_tail(double n, double t, double c_x, double c = 1.0);
// The unsimplified three-term form, kept for diagnostics:
// exp(-n t^2/(c c_x^2)) + exp(-sqrt(nt)/(4 c_x)) + n exp(-sqrt(nt)/(2 c_x)).
BoundResult squared_subexp_tail_three_term(double n, double t, double c_x,
                                           double c = 1.0);

// exp(-n t^2 / E[X^2]) for the lower tail of sums of non-negative variables.
BoundResult one_sided_bernstein(double n, double t, double second_moment);

// min(1, d1 d2 exp(-c n t^2 / c_max^2)).
BoundResult matrix_deviation_bound(double n, int d1, int d2, double c_max,
                                   double t, double c = 1.0);
// c1 c_max sqrt(ln d / n).
double matrix_deviation_level(double n, int d, double c_max, double c1 = 1.0);

// Monte-Carlo check that empirical exceedance frequencies stay under an
// analytic tail bound.
struct TailSampler {
  enum class Kind { Laplace, Gaussian, PointMass };
  Kind kind = Kind::Laplace;
  // Laplace scale, Gaussian std, or the point-mass location.
  double parameter = 1.0;

  double second_moment() const;
  double fourth_moment() const;
  double draw(RandomStream& rng) const;
};

enum class TailEvent {
  // sum_i (X_i^2 - E X^2) > n t
  UpperCenteredSquares,
  // sum_i (E X^2 - X_i^2) >= n t
  LowerCenteredSquares,
};

enum class SideConditionPolicy {
  // Skip the check (reporting why) when any side condition fails.
  Skip,
  // Run anyway; side-condition status is still reported.
  Report,
};

struct TailCheckReport {
  bool skipped = false;
  std::string skip_reason;
  std::int64_t trials = 0;
  std::int64_t exceedances = 0;
  double empirical_frequency = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool pass = false;
  std::map<std::string, bool> side_conditions;
};

using TailBoundFn = std::function<BoundResult(double n, double t)>;

// Passes iff frequency <= bound + 3 sqrt(bound (1 - bound) / trials).
// Trial i draws from rng.derive(i).
TailCheckReport empirical_tail_check(
    const TailSampler& sampler, TailEvent event, std::int64_t n, double t,
    const TailBoundFn& bound_fn, std::int64_t trials, const RngSpec& rng,
    SideConditionPolicy policy = SideConditionPolicy::Skip);

}  // namespace ldpsurvey::bounds
