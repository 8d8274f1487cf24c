#include "ldpsurvey/bounds.h"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "ldpsurvey/errors.h"

namespace ldpsurvey::bounds {
namespace {

BoundResult probability(double raw) {
  BoundResult out;
  out.vacuous = raw > 1.0;
  out.value = std::clamp(raw, 0.0, 1.0);
  return out;
}

double dlogd(int d) {
  return static_cast<double>(d) * std::log(static_cast<double>(d));
}

void require_dim(int d, int min_d, const char* who) {
  if (d < min_d) {
    throw PreconditionError(std::string(who) + ": dimension must be at least " +
                            std::to_string(min_d));
  }
}

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw PreconditionError(std::string(name) + " must be positive");
}

std::int64_t ceil_count(double v) {
  return static_cast<std::int64_t>(std::ceil(v));
}

}  // namespace

bool BoundResult::side_conditions_hold() const {
  return std::all_of(side_conditions.begin(), side_conditions.end(),
                     [](const auto& kv) { return kv.second; });
}

double TailParams::c_max() const { return std::max({c_x, c_w, c_eps}); }

void TailParams::check() const {
  if (!(c_x > 0.0) || !(c_w > 0.0) || !(c_eps > 0.0) || !(sigma_eps >= 0.0)) {
    throw PreconditionError("tail parameters must be positive");
  }
}

void SpectrumInfo::check() const { require_positive(lambda_min, "lambda_min"); }

double gamma_fn(double x) {
  if (x >= 1.0 && x <= 21.0 && x == std::floor(x)) {
    std::uint64_t f = 1;
    for (std::uint64_t k = 2; k < static_cast<std::uint64_t>(x); ++k) f *= k;
    return static_cast<double>(f);
  }
  return std::tgamma(x);
}

std::int64_t min_samples_gaussian(const SpectrumInfo& spec, double zeta,
                                  double alpha, double beta, int d, double c) {
  spec.check();
  require_dim(d, 2, "min_samples_gaussian");
  require_positive(zeta, "zeta");
  require_positive(alpha, "alpha");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw PreconditionError("min_samples_gaussian: beta must lie in (0, 1)");
  }
  const double z2 = zeta * zeta;
  const double inner = z2 + z2 * std::log(1.0 / beta) / (alpha * alpha);
  const double lam2 = spec.lambda_min * spec.lambda_min;
  return ceil_count(std::max(c / lam2 * inner * inner * dlogd(d), 1.0));
}

std::int64_t min_samples_laplace(const SpectrumInfo& spec, double zeta,
                                 double alpha, double c_eps, int d) {
  spec.check();
  require_dim(d, 2, "min_samples_laplace");
  require_positive(zeta, "zeta");
  require_positive(alpha, "alpha");
  const double scale = std::max({zeta / alpha, zeta * zeta, c_eps});
  const double logd = std::log(static_cast<double>(d));
  const double design_term = std::max(scale / spec.lambda_min, 1.0) * dlogd(d);
  const double tail_term = scale * logd * logd * logd;
  return ceil_count(std::max(design_term, tail_term));
}

double error_bound_gaussian(const TailParams& params, const SpectrumInfo& spec,
                            double zeta, double alpha, double beta,
                            double radius, int d, double m, double c2) {
  spec.check();
  require_dim(d, 2, "error_bound_gaussian");
  require_positive(m, "m");
  require_positive(alpha, "alpha");
  if (!(beta > 0.0 && beta < 1.0)) {
    throw PreconditionError("error_bound_gaussian: beta must lie in (0, 1)");
  }
  const double log_inv_beta = std::log(1.0 / beta);
  const double privacy_factor = std::sqrt(log_inv_beta / alpha + 1.0);
  const double noise_factor =
      zeta * std::sqrt(log_inv_beta) / alpha + params.sigma_eps;
  return c2 * zeta * privacy_factor * noise_factor / spec.lambda_min * radius *
         std::sqrt(dlogd(d) / m);
}

double error_bound_laplace(const TailParams& params, const SpectrumInfo& spec,
                           double zeta, double alpha, double radius, int d,
                           double m, double c2) {
  spec.check();
  require_dim(d, 2, "error_bound_laplace");
  require_positive(m, "m");
  require_positive(alpha, "alpha");
  const double scale = std::max({zeta / alpha, zeta * zeta, params.c_eps});
  return c2 / spec.lambda_min * scale * radius * std::sqrt(dlogd(d) / m);
}

LowerREParams lower_re_params(const SpectrumInfo& spec, double c_max, double m,
                              int d, double c1) {
  spec.check();
  require_dim(d, 2, "lower_re_params");
  require_positive(m, "m");
  const double lam = spec.lambda_min;
  LowerREParams out;
  out.alpha_ell = lam / 2.0;
  out.tau_md = c1 * lam * std::max(c_max * c_max / (lam * lam), 1.0) *
               std::log(static_cast<double>(d)) / m;
  out.feasible = out.tau_md <= out.alpha_ell / (2.0 * static_cast<double>(d));
  return out;
}

double subweibull_c1(double alpha_shape, double c_alpha, double beta_split) {
  return gamma_fn(2.0 * alpha_shape + 1.0) /
         std::pow((1.0 - beta_split) * c_alpha, 2.0 * alpha_shape);
}

double subweibull_c2(double alpha_shape, double c_alpha, double beta_split) {
  return beta_split * c_alpha * gamma_fn(3.0 * alpha_shape + 1.0) /
         (3.0 * std::pow((1.0 - beta_split) * c_alpha, 3.0 * alpha_shape));
}

BoundResult subweibull_right_tail(double n, double t, double alpha_shape,
                                  double c_alpha, double sigma_minus_sq,
                                  double beta_split) {
  if (!(n * t > 0.0)) throw PreconditionError("subweibull_right_tail: nt must be positive");
  if (!(alpha_shape > 1.0)) throw PreconditionError("subweibull_right_tail: shape must exceed 1");
  if (!(beta_split > 0.0 && beta_split < 1.0)) {
    throw PreconditionError("subweibull_right_tail: beta_split must lie in (0, 1)");
  }
  require_positive(c_alpha, "c_alpha");
  const double nt = n * t;
  const double c1 = subweibull_c1(alpha_shape, c_alpha, beta_split);
  const double c2 = subweibull_c2(alpha_shape, c_alpha, beta_split);
  const double root = std::pow(nt, 1.0 / alpha_shape);
  const double denom =
      sigma_minus_sq + c1 + std::pow(nt, 1.0 / alpha_shape - 1.0) * c2;
  const double raw = std::exp(-n * t * t / denom) +
                     std::exp(-beta_split * c_alpha * root) +
                     n * std::exp(-c_alpha * root);
  BoundResult out = probability(raw);
  out.constants_used = {{"c1", c1},
                        {"c2", c2},
                        {"beta_split", beta_split},
                        {"c_alpha", c_alpha}};
  return out;
}

namespace {

void check_squared_args(double n, double t, double c_x) {
  if (!(n >= 1.0)) throw PreconditionError("squared_subexp_tail: n must be at least 1");
  if (!(t > 0.0)) throw PreconditionError("squared_subexp_tail: t must be positive");
  if (!(c_x >= 1.0)) throw PreconditionError("squared_subexp_tail: c_x must be at least 1");
}

std::map<std::string, bool> squared_side_conditions(double n, double t,
                                                    double c_x) {
  const double logn = std::log(n);
  return {
      {"t_le_cx^(2/3)/n^(1/3)", t <= std::pow(c_x, 2.0 / 3.0) / std::cbrt(n)},
      {"n_ge_cx^2_ln^3_n", n >= c_x * c_x * logn * logn * logn},
  };
}

}  // namespace

BoundResult squared_subexp_tail(double n, double t, double c_x, double c) {
  check_squared_args(n, t, c_x);
  BoundResult out = probability(std::exp(-c * n * t * t / (c_x * c_x)));
  out.side_conditions = squared_side_conditions(n, t, c_x);
  out.constants_used = {{"c", c}};
  return out;
}

BoundResult squared_subexp_tail_three_term(double n, double t, double c_x,
                                           double c) {
  check_squared_args(n, t, c_x);
  const double root = std::sqrt(n * t);
  const double raw = std::exp(-n * t * t / (c * c_x * c_x)) +
                     std::exp(-root / (4.0 * c_x)) +
                     n * std::exp(-root / (2.0 * c_x));
  BoundResult out = probability(raw);
  out.side_conditions = {{"nt_gt_1", n * t > 1.0}};
  out.constants_used = {{"c", c}};
  return out;
}

BoundResult one_sided_bernstein(double n, double t, double second_moment) {
  if (!(n >= 1.0)) throw PreconditionError("one_sided_bernstein: n must be at least 1");
  if (!(t >= 0.0)) throw PreconditionError("one_sided_bernstein: t must be non-negative");
  require_positive(second_moment, "second_moment");
  return probability(std::exp(-n * t * t / second_moment));
}

BoundResult matrix_deviation_bound(double n, int d1, int d2, double c_max,
                                   double t, double c) {
  if (!(n >= 1.0)) throw PreconditionError("matrix_deviation_bound: n must be at least 1");
  if (d1 < 1 || d2 < 1) {
    throw PreconditionError("matrix_deviation_bound: dimensions must be positive");
  }
  require_positive(c_max, "c_max");
  if (!(t >= 0.0)) throw PreconditionError("matrix_deviation_bound: t must be non-negative");
  const double raw = static_cast<double>(d1) * static_cast<double>(d2) *
                     std::exp(-c * n * t * t / (c_max * c_max));
  BoundResult out = probability(raw);
  const double logn = std::log(n);
  out.side_conditions = {
      {"t_le_cmax^(2/3)/n^(1/3)", t <= std::pow(c_max, 2.0 / 3.0) / std::cbrt(n)},
      {"n_ge_cmax^2_ln^3_n", n >= c_max * c_max * logn * logn * logn},
  };
  out.constants_used = {{"c", c}};
  return out;
}

double matrix_deviation_level(double n, int d, double c_max, double c1) {
  require_positive(n, "n");
  require_dim(d, 1, "matrix_deviation_level");
  return c1 * c_max * std::sqrt(std::log(static_cast<double>(d)) / n);
}

double TailSampler::second_moment() const {
  switch (kind) {
    case Kind::Laplace:
      return 2.0 * parameter * parameter;
    case Kind::Gaussian:
      return parameter * parameter;
    case Kind::PointMass:
      return parameter * parameter;
  }
  return 0.0;
}

double TailSampler::fourth_moment() const {
  const double p2 = parameter * parameter;
  switch (kind) {
    case Kind::Laplace:
      return 24.0 * p2 * p2;
    case Kind::Gaussian:
      return 3.0 * p2 * p2;
    case Kind::PointMass:
      return p2 * p2;
  }
  return 0.0;
}

double TailSampler::draw(RandomStream& rng) const {
  switch (kind) {
    case Kind::Laplace:
      return rng.laplace(parameter);
    case Kind::Gaussian:
      return rng.normal(0.0, parameter);
    case Kind::PointMass:
      return parameter;
  }
  return 0.0;
}

TailCheckReport empirical_tail_check(const TailSampler& sampler,
                                     TailEvent event, std::int64_t n, double t,
                                     const TailBoundFn& bound_fn,
                                     std::int64_t trials, const RngSpec& rng,
                                     SideConditionPolicy policy) {
  if (n < 1 || trials < 1) {
    throw PreconditionError("empirical_tail_check: n and trials must be positive");
  }
  TailCheckReport report;
  report.trials = trials;

  BoundResult bound;
  try {
    bound = bound_fn(static_cast<double>(n), t);
  } catch (const PreconditionError& e) {
    report.skipped = true;
    report.skip_reason = e.what();
    return report;
  }
  report.bound = bound.value;
  report.side_conditions = bound.side_conditions;
  if (policy == SideConditionPolicy::Skip && !bound.side_conditions_hold()) {
    report.skipped = true;
    for (const auto& [name, holds] : bound.side_conditions) {
      if (!holds) report.skip_reason += (report.skip_reason.empty() ? "" : ", ") + name;
    }
    report.skip_reason = "side conditions violated: " + report.skip_reason;
    return report;
  }

  const double mean_square = sampler.second_moment();
  const double threshold = static_cast<double>(n) * t;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    RandomStream stream(rng.derive(static_cast<std::uint64_t>(trial)));
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double x = sampler.draw(stream);
      sum += x * x - mean_square;
    }
    const bool exceeded = event == TailEvent::UpperCenteredSquares
                              ? sum > threshold
                              : -sum >= threshold;
    if (exceeded) ++report.exceedances;
  }
  report.empirical_frequency =
      static_cast<double>(report.exceedances) / static_cast<double>(trials);
  report.slack =
      3.0 * std::sqrt(report.bound * (1.0 - report.bound) / static_cast<double>(trials));
  report.pass = report.empirical_frequency <= report.bound + report.slack;
  return report;
}

}  // namespace ldpsurvey::bounds
