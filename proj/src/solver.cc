#include "ldpsurvey/solver.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {

CorrectedMoments corrected_moments(const Matrix& z, const Vector& y,
                                   double sigma_w_diagonal) {
  if (z.rows() == 0) throw PreconditionError("corrected_moments: no rows");
  if (z.rows() != y.size()) {
    throw StructuralError("corrected_moments: Z and y row counts differ");
  }
  const double m = static_cast<double>(z.rows());
  CorrectedMoments out;
  out.m = static_cast<std::size_t>(z.rows());
  Matrix gram = z.transpose() * z / m;
  gram.diagonal().array() -= sigma_w_diagonal;
  out.gamma_matrix = (gram + gram.transpose()) / 2.0;
  out.gamma_vector = z.transpose() * y / m;
  return out;
}

CorrectedMoments corrected_moments(const PrivateDataset& pds) {
  return corrected_moments(pds.z, pds.y, pds.sigma_w_diagonal);
}

Vector project_l1(const Vector& v, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("project_l1: radius must be positive");
  if (v.lpNorm<1>() <= radius) return v;

  std::vector<double> mags(v.data(), v.data() + v.size());
  for (double& a : mags) a = std::abs(a);
  std::sort(mags.begin(), mags.end(), std::greater<>());

  // Largest k with mags[k] > (sum of the top k+1 magnitudes - radius)/(k+1).
  double running = 0.0;
  double level = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    running += mags[k];
    const double candidate = (running - radius) / static_cast<double>(k + 1);
    if (mags[k] > candidate) level = candidate;
  }
  return soft_threshold(v, level);
}

Vector soft_threshold(const Vector& v, double level) {
  if (!(level >= 0.0)) throw PreconditionError("soft_threshold: negative level");
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double shrunk = std::max(std::abs(v[i]) - level, 0.0);
    out[i] = v[i] < 0.0 ? -shrunk : shrunk;
  }
  return out;
}

double spectral_bound(const Matrix& a) {
  if (a.size() == 0 || a.isZero(0.0)) return 0.0;
  const Matrix ata = a.transpose() * a;

  auto iterate = [&](Vector v) {
    double estimate = 0.0;
    for (int i = 0; i < 200; ++i) {
      Vector next = ata * v;
      const double norm = next.norm();
      if (norm == 0.0) return 0.0;
      estimate = norm;
      v = next / norm;
    }
    // v is now unit length; the Rayleigh quotient of A^T A is ||A v||^2.
    return std::max(std::sqrt(estimate), (a * v).norm());
  };

  const auto n = a.cols();
  double estimate = iterate(Vector::Ones(n) / std::sqrt(static_cast<double>(n)));
  if (estimate == 0.0) {
    // The all-ones start was orthogonal to the range of A^T A.
    Vector alt = Vector::LinSpaced(n, 1.0, static_cast<double>(n));
    estimate = iterate(alt.normalized());
  }
  // Power iteration approaches the norm from below; the Frobenius norm is a
  // guaranteed ceiling.
  return std::min(estimate * 1.005, a.norm());
}

double objective(const CorrectedMoments& moments, const CoefficientVector& theta,
                 double lambda_n) {
  if (theta.size() != moments.gamma_vector.size()) {
    throw StructuralError("objective: dimension mismatch");
  }
  return 0.5 * theta.dot(moments.gamma_matrix * theta) -
         moments.gamma_vector.dot(theta) + lambda_n * theta.lpNorm<1>();
}

SolverConfig SolverConfig::constrained(double radius) {
  SolverConfig cfg;
  cfg.mode = Mode::Constrained;
  cfg.radius = radius;
  return cfg;
}

SolverConfig SolverConfig::lagrangian(double lambda_n,
                                      std::optional<double> radius_guard) {
  SolverConfig cfg;
  cfg.mode = Mode::Lagrangian;
  cfg.lambda_n = lambda_n;
  cfg.radius_guard = radius_guard;
  return cfg;
}

void SolverConfig::check() const {
  if (mode == Mode::Constrained && !(radius > 0.0)) {
    throw PreconditionError("constrained mode requires a positive radius");
  }
  if (mode == Mode::Lagrangian && !(lambda_n >= 0.0)) {
    throw PreconditionError("lagrangian mode requires lambda_n >= 0");
  }
  if (radius_guard && !(*radius_guard > 0.0)) {
    throw PreconditionError("radius guard must be positive");
  }
  if (max_iter < 1) throw PreconditionError("max_iter must be positive");
  if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
  if (fixed_step && !(*fixed_step > 0.0)) {
    throw PreconditionError("fixed step must be positive");
  }
}

double default_lambda(std::size_t d, std::size_t m, double c_pen) {
  if (m == 0 || d == 0) throw PreconditionError("default_lambda: empty problem");
  return c_pen * std::sqrt(std::log(static_cast<double>(d)) /
                           static_cast<double>(m));
}

namespace {

// f(next) - f(current) evaluated from the step itself. Subtracting two
// objective values loses everything below the ulp of |f|, which stalls the
// stopping rule long before the iterates settle.
double objective_change(const CorrectedMoments& moments, const Vector& current,
                        const Vector& next, double lambda) {
  const Vector delta = next - current;
  const Vector mid = 0.5 * (next + current);
  return delta.dot(moments.gamma_matrix * mid - moments.gamma_vector) +
         lambda * (next.lpNorm<1>() - current.lpNorm<1>());
}

}  // namespace

SolveResult solve_with_trace(const CorrectedMoments& moments,
                             const SolverConfig& config,
                             std::vector<double>* objective_trace) {
  config.check();
  const auto d = moments.gamma_vector.size();
  if (moments.gamma_matrix.rows() != d || moments.gamma_matrix.cols() != d) {
    throw StructuralError("solve: moment dimensions are inconsistent");
  }
  const bool constrained = config.mode == SolverConfig::Mode::Constrained;
  const double lambda = constrained ? 0.0 : config.lambda_n;

  SolveResult result;
  result.step_size_used =
      config.fixed_step ? *config.fixed_step
                        : 1.0 / std::max(spectral_bound(moments.gamma_matrix), 1e-12);
  const double step = result.step_size_used;

  Vector theta = Vector::Zero(d);
  // A zero linear term makes theta = 0 a fixed point even when it is a
  // maximizer along a direction of negative curvature; nudge toward the
  // positive side of the most negative diagonal entry.
  if (d > 0 && moments.gamma_vector.isZero(0.0)) {
    Eigen::Index most_negative = 0;
    const double lowest = moments.gamma_matrix.diagonal().minCoeff(&most_negative);
    if (lowest < 0.0) {
      theta[most_negative] = 1e-8;
      result.perturbed_start = true;
    }
  }

  auto step_from = [&](const Vector& current) {
    Vector next = current - step * (moments.gamma_matrix * current -
                                    moments.gamma_vector);
    if (constrained) return project_l1(next, config.radius);
    next = soft_threshold(next, step * lambda);
    if (config.radius_guard) next = project_l1(next, *config.radius_guard);
    return next;
  };

  double current = objective(moments, theta, lambda);
  if (objective_trace) objective_trace->assign(1, current);
  for (int k = 1; k <= config.max_iter; ++k) {
    Vector next = step_from(theta);
    const double value = objective(moments, next, lambda);
    if (!std::isfinite(value) || !next.allFinite()) {
      throw DivergedError("solver objective became non-finite at iteration " +
                              std::to_string(k),
                          theta, k);
    }
    const double change = std::abs(objective_change(moments, theta, next, lambda));
    theta = std::move(next);
    current = value;
    result.iterations = k;
    if (objective_trace) objective_trace->push_back(value);
    if (change <= config.tol * std::max(std::abs(value), 1e-14)) {
      result.converged = true;
      break;
    }
  }
  result.theta_hat = std::move(theta);
  result.final_objective = current;
  return result;
}

SolveResult solve(const CorrectedMoments& moments, const SolverConfig& config) {
  return solve_with_trace(moments, config, nullptr);
}

std::string to_string(SolverConfig::Mode mode) {
  return mode == SolverConfig::Mode::Constrained ? "constrained" : "lagrangian";
}

SolverConfig::Mode parse_solver_mode(const std::string& text) {
  if (text == "constrained") return SolverConfig::Mode::Constrained;
  if (text == "lagrangian") return SolverConfig::Mode::Lagrangian;
  throw PreconditionError("unknown solver mode '" + text + "'");
}

}  // namespace ldpsurvey
