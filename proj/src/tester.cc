#include "ldpsurvey/tester.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "ldpsurvey/errors.h"

namespace ldpsurvey {

double TestConfig::constant(const std::string& name) const {
  const auto it = constants.find(name);
  return it == constants.end() ? 1.0 : it->second;
}

void TestConfig::check() const {
  if (!(kappa >= 0.0)) throw PreconditionError("kappa must be non-negative");
  if (!(tol > 0.0 && tol <= 1.0)) throw PreconditionError("tol must lie in (0, 1]");
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw PreconditionError("delta must lie in (0, 1]");
  }
}

ReplaySource::ReplaySource(std::vector<DataPoint> rows) : rows_(std::move(rows)) {}

ReplaySource::ReplaySource(const Dataset& ds) {
  rows_.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    rows_.push_back(DataPoint{ds.x(r), ds.y(r)});
  }
}

std::optional<std::size_t> ReplaySource::available() const {
  return rows_.size() - cursor_;
}

std::vector<DataPoint> ReplaySource::draw(std::size_t t, const RngSpec&) {
  const std::size_t left = rows_.size() - cursor_;
  if (left < t) throw InsufficientValidationError(t, left);
  std::vector<DataPoint> out(rows_.begin() + static_cast<std::ptrdiff_t>(cursor_),
                             rows_.begin() + static_cast<std::ptrdiff_t>(cursor_ + t));
  cursor_ += t;
  return out;
}

std::size_t validation_sample_size(double tau, double delta, double tol) {
  if (!(tau > 0.0)) throw PreconditionError("tau must be positive");
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must lie in (0, 1]");
  if (!(tol > 0.0 && tol <= 1.0)) throw PreconditionError("tol must lie in (0, 1]");
  const double raw = tau * tau * std::log(4.0 / delta) / (2.0 * tol * tol);
  // Snap values that are integers up to rounding so ln(e^2)-style inputs do
  // not round up a whole sample.
  const double nearest = std::round(raw);
  const double value =
      std::abs(raw - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest : std::ceil(raw);
  return static_cast<std::size_t>(std::max(value, 1.0));
}

double survey_loss_bound(double l_hat, std::size_t m, std::size_t d,
                         const ModelBounds& bounds, double delta,
                         LossBoundForm form) {
  if (!(l_hat >= 0.0)) throw PreconditionError("l_hat must be non-negative");
  if (m == 0 || d == 0) throw PreconditionError("survey_loss_bound: empty survey");
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("delta must lie in (0, 1]");
  const double tau = bounds.tau();
  const double r = bounds.radius();
  const double dd = static_cast<double>(d);
  const double root_m = std::sqrt(static_cast<double>(m));
  const double dim_term = form == LossBoundForm::LogD
                              ? std::sqrt(2.0 * std::log(2.0 * dd))
                              : std::sqrt(dd + 1.0);
  return l_hat + 8.0 * tau * bounds.zeta() * r * r * dim_term / root_m +
         3.0 * tau * std::sqrt(std::log(4.0 / delta) / (2.0 * static_cast<double>(m)));
}

namespace {

double dimension_rate(double m, std::size_t d) {
  if (!(m > 0.0) || d == 0) throw PreconditionError("privacy penalty: empty survey");
  const double dd = static_cast<double>(d);
  return std::sqrt(dd * std::log(dd) / m);
}

}  // namespace

double privacy_penalty_gaussian(const ModelBounds& bounds, double alpha,
                                double beta, double lambda_min, double m,
                                std::size_t d, double c2) {
  if (!(beta > 0.0 && beta < 1.0)) throw PreconditionError("beta must lie in (0, 1)");
  if (!(lambda_min > 0.0)) throw PreconditionError("lambda_min must be positive");
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  const double zeta = bounds.zeta();
  const double log_inv_beta = std::log(1.0 / beta);
  return 2.0 * c2 * zeta * zeta * zeta / lambda_min * std::sqrt(log_inv_beta) /
         alpha * (log_inv_beta / alpha + 1.0) * bounds.radius() *
         dimension_rate(m, d);
}

double privacy_penalty_laplace(const ModelBounds& bounds, double alpha,
                               double c_eps, double lambda_min, double m,
                               std::size_t d, double c2) {
  if (!(lambda_min > 0.0)) throw PreconditionError("lambda_min must be positive");
  if (!(alpha > 0.0)) throw PreconditionError("alpha must be positive");
  const double zeta = bounds.zeta();
  return c2 * zeta / lambda_min * std::max({zeta / alpha, zeta * zeta, c_eps}) *
         bounds.radius() * dimension_rate(m, d);
}

double decision_margin(double gamma_d, double gamma_s, double kappa, double tol) {
  return std::sqrt(gamma_d) - std::sqrt(gamma_s) - kappa - tol;
}

Decision decide(double gamma_d, double gamma_s, double kappa, double tol) {
  return decision_margin(gamma_d, gamma_s, kappa, tol) > 0.0 ? Decision::Reject
                                                            : Decision::Accept;
}

namespace {

void require_survey(const Dataset& survey, const TestConfig& cfg) {
  cfg.check();
  if (survey.size() == 0) throw StructuralError("survey is empty");
  if (!survey.validated()) {
    throw PreconditionError("survey must be validated against its bounds");
  }
  const auto& own = survey.bounds();
  if (own.zeta() != cfg.bounds.zeta() || own.tau() != cfg.bounds.tau()) {
    const ValidationReport report = check_bounds(survey.with_bounds(cfg.bounds));
    if (!report.ok()) {
      throw PreconditionError("survey violates the tester bounds in " +
                              std::to_string(report.violations.size()) + " cells");
    }
  }
}

std::size_t require_budget(const ValidationSource& source, const TestConfig& cfg) {
  const std::size_t t = validation_sample_size(cfg.bounds.tau(), cfg.delta, cfg.tol);
  const auto left = source.available();
  if (left && *left < t) throw InsufficientValidationError(t, *left);
  return t;
}

void range_warning(std::size_t d, const ModelBounds& b,
                   std::vector<std::string>& warnings) {
  const double limit = b.tau() / (b.zeta() * std::sqrt(static_cast<double>(d) + 1.0));
  if (b.radius() > limit) {
    warnings.push_back("radius exceeds tau/(zeta sqrt(d+1)); fitted predictions "
                       "are not guaranteed to stay within [-tau, tau]");
  }
}

// Shared tail of both testers: validation draws and the decision.
void finish(Verdict& v, std::size_t d, ValidationSource& source,
            const TestConfig& cfg, const RngSpec& rng) {
  const std::vector<DataPoint> draws = source.draw(v.t_used, rng.derive(1));
  double sum = 0.0;
  for (const auto& p : draws) {
    if (static_cast<std::size_t>(p.x.size()) != d) {
      throw StructuralError("validation point has dimension " +
                            std::to_string(p.x.size()) + ", survey has " +
                            std::to_string(d));
    }
    if (std::abs(p.y) > cfg.bounds.tau()) ++v.validation_out_of_range;
    const double residual = predict(v.theta_hat, p.x) - p.y;
    sum += residual * residual;
  }
  v.gamma_d = sum / static_cast<double>(draws.size());
  v.margin = decision_margin(v.gamma_d, v.gamma_s, cfg.kappa, cfg.tol);
  v.decision = decide(v.gamma_d, v.gamma_s, cfg.kappa, cfg.tol);
  if (v.validation_out_of_range > 0) {
    v.warnings.push_back(std::to_string(v.validation_out_of_range) +
                         " validation responses fall outside [-tau, tau]");
  }
}

}  // namespace

Verdict surverify(const Dataset& survey, ValidationSource& source,
                  const TestConfig& cfg, const RngSpec& rng) {
  require_survey(survey, cfg);
  Verdict v;
  v.t_used = require_budget(source, cfg);
  v.loss_bound_form = cfg.loss_bound_form;
  const std::size_t d = survey.dim();
  range_warning(d, cfg.bounds, v.warnings);

  const CorrectedMoments moments =
      corrected_moments(survey.design_matrix(), survey.response_vector(), 0.0);
  const SolveResult fit = solve(moments, SolverConfig::constrained(cfg.bounds.radius()));
  v.theta_hat = fit.theta_hat;
  v.solver_iterations = fit.iterations;
  v.solver_converged = fit.converged;

  v.l_hat = empirical_loss(v.theta_hat, survey);
  v.gamma_s = survey_loss_bound(v.l_hat, survey.size(), d, cfg.bounds, cfg.delta,
                                cfg.loss_bound_form);
  finish(v, d, source, cfg, rng);
  return v;
}

Verdict priverify(const Dataset& survey, ValidationSource& source,
                  const TestConfig& cfg, const PrivacyParams& privacy,
                  const PrivateTestOptions& options, const RngSpec& rng) {
  require_survey(survey, cfg);
  Verdict v;
  v.t_used = require_budget(source, cfg);
  v.loss_bound_form = cfg.loss_bound_form;
  const std::size_t d = survey.dim();
  const std::size_t m = survey.size();
  range_warning(d, cfg.bounds, v.warnings);

  NoiseSpec noise;
  if (options.noise_override) {
    noise = *options.noise_override;
  } else {
    NoiseCalibration cal =
        make_noise_spec(privacy, cfg.bounds.zeta(), d, options.gaussian_formula,
                        options.gaussian_formula_constant);
    noise = cal.spec;
    v.warnings.insert(v.warnings.end(), cal.warnings.begin(), cal.warnings.end());
  }
  const PrivateDataset pds = privatize(survey, noise, privacy, rng.derive(0));
  const CorrectedMoments moments = corrected_moments(pds);
  const SolveResult fit = solve(moments, SolverConfig::constrained(cfg.bounds.radius()));
  v.theta_hat = fit.theta_hat;
  v.solver_iterations = fit.iterations;
  v.solver_converged = fit.converged;
  v.l_hat = empirical_loss(v.theta_hat, pds.z, pds.y);

  double lambda_min = 0.0;
  if (options.lambda_min) {
    if (!(*options.lambda_min > 0.0)) {
      throw PreconditionError("declared lambda_min must be positive");
    }
    lambda_min = *options.lambda_min;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(moments.gamma_matrix,
                                              Eigen::EigenvaluesOnly);
    lambda_min = std::max(eig.eigenvalues().minCoeff(), options.lambda_min_floor);
    v.lambda_min_estimated = true;
    v.warnings.push_back(
        "lambda_min estimated from the corrected Gram matrix (heuristic)");
  }
  v.lambda_min = lambda_min;

  const double c2 = cfg.constant("c2");
  v.constants_used["c2"] = c2;
  if (privacy.pure()) {
    const double c_eps = cfg.constant("c_eps");
    v.constants_used["c_eps"] = c_eps;
    v.j_hat = privacy_penalty_laplace(cfg.bounds, privacy.alpha(), c_eps,
                                      lambda_min, static_cast<double>(m), d, c2);
  } else {
    v.j_hat = privacy_penalty_gaussian(cfg.bounds, privacy.alpha(), privacy.beta(),
                                       lambda_min, static_cast<double>(m), d, c2);
  }
  if (d == 1) {
    v.warnings.push_back("d = 1 gives ln d = 0, so the privacy penalty vanishes");
  }

  v.gamma_s = survey_loss_bound(v.l_hat, m, d, cfg.bounds, cfg.delta,
                                cfg.loss_bound_form) +
              v.j_hat;
  finish(v, d, source, cfg, rng);
  return v;
}

std::string to_string(Decision decision) {
  return decision == Decision::Accept ? "ACCEPT" : "REJECT";
}

std::string to_string(LossBoundForm form) {
  return form == LossBoundForm::LogD ? "log-d" : "sqrt-d-plus-1";
}

LossBoundForm parse_loss_bound_form(const std::string& text) {
  if (text == "log-d") return LossBoundForm::LogD;
  if (text == "sqrt-d-plus-1") return LossBoundForm::SqrtDPlus1;
  throw PreconditionError("unknown loss bound form '" + text + "'");
}

}  // namespace ldpsurvey
