#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ldpsurvey/core.h"
#include "ldpsurvey/mechanisms.h"

namespace ldpsurvey {

// Bias-corrected second moments of noisy covariates:
//   gamma_matrix = Z^T Z / m - Sigma_w   (symmetrized, possibly indefinite)
//   gamma_vector = Z^T y / m
struct CorrectedMoments {
  Matrix gamma_matrix;
  Vector gamma_vector;
  std::size_t m = 0;

  std::size_t dim() const { return static_cast<std::size_t>(gamma_vector.size()); }
};

CorrectedMoments corrected_moments(const PrivateDataset& pds);
CorrectedMoments corrected_moments(const Matrix& z, const Vector& y,
                                   double sigma_w_diagonal);

// Euclidean projection onto {u : ||u||_1 <= radius}.
Vector project_l1(const Vector& v, double radius);

// sign(v_i) * max(|v_i| - level, 0).
Vector soft_threshold(const Vector& v, double level);

// Upper estimate of the spectral norm from 200 power iterations on A^T A
// started at the normalized all-ones vector. Zero for the zero matrix.
double spectral_bound(const Matrix& a);

// 1/2 theta^T G theta - <g, theta> + lambda ||theta||_1.
double objective(const CorrectedMoments& moments, const CoefficientVector& theta,
                 double lambda_n);

struct SolverConfig {
  enum class Mode { Constrained, Lagrangian };

  Mode mode = Mode::Constrained;
  // Constrained: the l1 ball radius. Lagrangian: optional guard radius,
  // applied after every proximal step when set.
  double radius = 1.0;
  std::optional<double> radius_guard;
  double lambda_n = 0.0;
  int max_iter = 10000;
  // Relative objective change that counts as converged.
  double tol = 1e-9;
  // Unset selects 1 / spectral_bound(gamma_matrix).
  std::optional<double> fixed_step;

  static SolverConfig constrained(double radius);
  static SolverConfig lagrangian(double lambda_n,
                                 std::optional<double> radius_guard = {});
  void check() const;
};

// c_pen * sqrt(ln d / m): the penalty used when none is configured.
double default_lambda(std::size_t d, std::size_t m, double c_pen = 1.0);

struct SolveResult {
  CoefficientVector theta_hat;
  int iterations = 0;
  double final_objective = 0.0;
  bool converged = false;
  double step_size_used = 0.0;
  // True when the start point was nudged off an exact saddle.
  bool perturbed_start = false;
};

// Projected (Constrained) or proximal (Lagrangian) gradient descent from 0.
// Throws DivergedError if the objective stops being finite.
SolveResult solve(const CorrectedMoments& moments, const SolverConfig& config);

// Per-iteration objective values, for diagnostics and descent tests.
SolveResult solve_with_trace(const CorrectedMoments& moments,
                             const SolverConfig& config,
                             std::vector<double>* objective_trace);

std::string to_string(SolverConfig::Mode mode);
SolverConfig::Mode parse_solver_mode(const std::string& text);

}  // namespace ldpsurvey
