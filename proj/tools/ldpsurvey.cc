// Command-line front end: gen, publish, fit, verify, bounds, sweep.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.h"
#include "ldpsurvey/bounds.h"
#include "ldpsurvey/core.h"
#include "ldpsurvey/csv_io.h"
#include "ldpsurvey/datagen.h"
#include "ldpsurvey/errors.h"
#include "ldpsurvey/mechanisms.h"
#include "ldpsurvey/solver.h"
#include "ldpsurvey/sweep.h"
#include "ldpsurvey/tester.h"

namespace {

using nlohmann::json;
using namespace ldpsurvey;

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitReject = 3;

struct Globals {
  std::uint64_t seed = 0;
  std::string output;
  std::string format = "json";
  bool quiet = false;
};

json to_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

// Resolved flag values of one subcommand, as strings so the block can be fed
// back through --config.
json resolved_options(const CLI::App* app) {
  json out = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const std::string& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& res = opt->results();
      out[name] = res.size() == 1 ? json(res.front()) : json(res);
    } else if (!opt->get_default_str().empty()) {
      out[name] = opt->get_default_str();
    }
  }
  return out;
}

json manifest(const CLI::App* sub, const Globals& g) {
  return {{"tool", "ldpsurvey"},
          {"version", kVersion},
          {"command", sub->get_name()},
          {"seed", g.seed},
          {"config", {{sub->get_name(), resolved_options(sub)}}}};
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

void emit_json(const json& j, const std::string& path) { emit_text(j.dump(2) + "\n", path); }

void note(const Globals& g, const std::string& message) {
  if (!g.quiet) std::cerr << message << '\n';
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += cells[i];
  }
  return line + '\n';
}

bool file_exists(const std::string& path) { return std::filesystem::exists(path); }

// gen ------------------------------------------------------------------------

struct GenOptions {
  std::string kind = "synthetic1";
  std::size_t d = 10;
  std::size_t m = 10000;
  double mu = 0.0;
  std::string noise = "gaussian";
  std::string out;
};

json generator_json(const LinearModelSource& src) {
  return {{"kind", "linear"},
          {"theta", to_json(src.theta())},
          {"covariates", {{"kind", to_string(src.covariates().kind)},
                          {"zeta", src.covariates().zeta}}},
          {"reg_noise", {{"kind", to_string(src.noise().kind)},
                         {"variance", src.noise().variance}}}};
}

json bounds_json(const ModelBounds& b) {
  return {{"zeta", b.zeta()}, {"tau", b.tau()}, {"radius", b.radius()}};
}

int run_gen(const GenOptions& o, const Globals& g, const CLI::App* sub) {
  const std::string prefix = !o.out.empty() ? o.out : g.output;
  if (prefix.empty()) throw PreconditionError("gen needs --out <prefix>");
  const RngSpec rng{g.seed, 0};
  json truth;
  truth["manifest"] = manifest(sub, g);
  truth["variance_convention"] = "second parameter of N(., .) is a variance";

  if (o.kind == "synthetic1") {
    Synthetic1 data = gen_synthetic1(o.d, o.m, o.mu, rng);
    const ModelBounds env = data.survey.bounds();
    auto [survey, clip] = clip_to_bounds(data.survey, env.zeta(), env.tau());
    const std::string survey_path = prefix + "_survey.csv";
    const std::string validation_path = prefix + "_validation.json";
    save_csv(survey, survey_path);

    json spec = generator_json(data.star_sampler);
    spec["bounds"] = bounds_json(env);
    write_json_file(spec, validation_path);

    truth["kind"] = "synthetic1";
    truth["theta_s"] = to_json(data.theta_s);
    truth["theta_star"] = to_json(data.theta_star);
    truth["bounds"] = bounds_json(env);
    truth["clipped_cells"] = clip.per_column;
    write_json_file(truth, prefix + "_truth.json");

    // Ready-made --config for verifying this survey against its reference.
    json verify_cfg = {{"verify",
                        {{"survey", survey_path},
                         {"validation", validation_path},
                         {"zeta", env.zeta()},
                         {"tau", env.tau()},
                         {"radius", env.radius()}}}};
    write_json_file(verify_cfg, prefix + "_verify.json");
    note(g, "clipped " + std::to_string(clip.total()) + " cells to the 4-sigma envelope");
  } else if (o.kind == "synthetic2") {
    const Synthetic2 data = gen_synthetic2(o.d, o.m, parse_noise_kind(o.noise), rng);
    save_csv(data.clean, prefix + "_clean.csv");
    save_private(data.noisy, prefix + "_noisy.csv", {{"manifest", manifest(sub, g)}});
    truth["kind"] = "synthetic2";
    truth["theta_star"] = to_json(data.theta_star);
    truth["bounds"] = bounds_json(data.clean.bounds());
    write_json_file(truth, prefix + "_truth.json");
  } else {
    throw PreconditionError("unknown --kind '" + o.kind + "'");
  }
  return kExitOk;
}

// publish --------------------------------------------------------------------

struct PublishOptions {
  std::string input;
  std::string output;
  double alpha = 1.0;
  double beta = 0.0;
  double zeta = 1.0;
  std::optional<double> tau;
  std::string accounting = "per-coord";
  std::string gaussian_formula = "standard";
  double formula_constant = 1.0;
};

int run_publish(const PublishOptions& o, const Globals& g, const CLI::App* sub) {
  const std::string out_path = !o.output.empty() ? o.output : g.output;
  if (out_path.empty()) throw PreconditionError("publish needs --output <csv>");
  // Responses are released in the clear, so tau only matters when given.
  const double tau = o.tau.value_or(std::numeric_limits<double>::max());
  Dataset ds = load_csv(o.input, ModelBounds(o.zeta, tau, 1.0));
  const ValidationReport report = validate_dataset(ds);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw PreconditionError(std::to_string(report.violations.size()) +
                            " bound violations; first at row " + std::to_string(v.row) +
                            ", column " + std::to_string(v.column) +
                            " (clip the data or raise --zeta/--tau)");
  }
  const PrivacyParams params(o.alpha, o.beta, parse_accounting(o.accounting));
  const NoiseCalibration cal = make_noise_spec(params, o.zeta, ds.dim(),
                                               parse_gaussian_formula(o.gaussian_formula),
                                               o.formula_constant);
  for (const auto& w : cal.warnings) note(g, "warning: " + w);
  const PrivateDataset pds = privatize(ds, cal.spec, params, RngSpec{g.seed, 0});
  save_private(pds, out_path,
               {{"gaussian_variance_formula", to_string(cal.formula)},
                {"warnings", cal.warnings},
                {"manifest", manifest(sub, g)}});
  return kExitOk;
}

// fit ------------------------------------------------------------------------

struct FitOptions {
  std::string input;
  std::string sigma_w;
  std::string mode = "constrained";
  double radius = 1.0;
  std::optional<double> lambda;
  std::optional<double> radius_guard;
  int max_iter = 10000;
  double tol = 1e-9;
  double c_pen = 1.0;
};

int run_fit(const FitOptions& o, const Globals& g, const CLI::App* sub) {
  const bool has_sidecar = file_exists(sidecar_path(o.input));
  const std::string sigma_w = !o.sigma_w.empty() ? o.sigma_w
                              : has_sidecar      ? "from-sidecar"
                                                 : "0";
  Matrix z;
  Vector y;
  double sigma = 0.0;
  if (sigma_w == "from-sidecar") {
    if (!has_sidecar) throw PreconditionError("no sidecar next to '" + o.input + "'");
    const PrivateDataset pds = load_private(o.input);
    z = pds.z;
    y = pds.y;
    sigma = pds.sigma_w_diagonal;
  } else {
    const Dataset ds = load_csv(o.input, ModelBounds(1.0, 1.0, 1.0));
    z = ds.design_matrix();
    y = ds.response_vector();
    try {
      std::size_t used = 0;
      sigma = std::stod(sigma_w, &used);
      if (used != sigma_w.size()) throw std::invalid_argument(sigma_w);
    } catch (const std::exception&) {
      throw PreconditionError("--sigma-w must be a number or 'from-sidecar'");
    }
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
      throw PreconditionError("--sigma-w must be finite and non-negative");
    }
  }

  const CorrectedMoments moments = corrected_moments(z, y, sigma);
  SolverConfig cfg;
  double lambda = 0.0;
  if (parse_solver_mode(o.mode) == SolverConfig::Mode::Constrained) {
    cfg = SolverConfig::constrained(o.radius);
  } else {
    lambda = o.lambda.value_or(default_lambda(moments.dim(), moments.m, o.c_pen));
    cfg = SolverConfig::lagrangian(lambda, o.radius_guard);
  }
  cfg.max_iter = o.max_iter;
  cfg.tol = o.tol;
  const SolveResult res = solve(moments, cfg);
  if (!res.converged) note(g, "warning: solver stopped at max-iter without converging");

  if (g.format == "csv") {
    std::string text = "coordinate,theta\n";
    for (Eigen::Index i = 0; i < res.theta_hat.size(); ++i) {
      text += csv_line({std::to_string(i + 1), format_double(res.theta_hat[i])});
    }
    emit_text(text, g.output);
    return kExitOk;
  }
  json j;
  j["theta_hat"] = to_json(res.theta_hat);
  j["iterations"] = res.iterations;
  j["objective"] = res.final_objective;
  j["converged"] = res.converged;
  j["step_size_used"] = res.step_size_used;
  j["perturbed_start"] = res.perturbed_start;
  j["mode"] = to_string(cfg.mode);
  j["lambda_n"] = lambda;
  j["sigma_w_diagonal"] = sigma;
  j["m"] = moments.m;
  j["manifest"] = manifest(sub, g);
  emit_json(j, g.output);
  return kExitOk;
}

// verify ---------------------------------------------------------------------

struct VerifyOptions {
  std::string survey;
  std::string validation;
  double kappa = 0.0;
  double tol = 0.1;
  double delta = 0.1;
  double tau = 1.0;
  double radius = 1.0;
  double zeta = 1.0;
  std::string loss_bound_form = "log-d";
  std::optional<double> alpha;
  double beta = 0.0;
  std::optional<double> lambda_min;
  std::string accounting = "per-coord";
  std::string gaussian_formula = "standard";
  double c2 = 1.0;
  double c_eps = 1.0;
};

std::unique_ptr<ValidationSource> open_validation(const std::string& path,
                                                  const ModelBounds& bounds) {
  const bool is_json = std::filesystem::path(path).extension() == ".json";
  if (!is_json) return std::make_unique<ReplaySource>(load_csv(path, bounds));
  const json spec = read_json_file(path);
  try {
    const std::string kind = spec.value("kind", "linear");
    if (kind != "linear") throw PreconditionError("unsupported generator kind '" + kind + "'");
    CovariateDist cov;
    if (spec.contains("covariates")) {
      cov.kind = parse_covariate_kind(spec.at("covariates").value("kind", "standard_normal"));
      cov.zeta = spec.at("covariates").value("zeta", 1.0);
    }
    RegNoiseDist noise;
    if (spec.contains("reg_noise")) {
      noise.kind = parse_reg_noise_kind(spec.at("reg_noise").value("kind", "gaussian"));
      noise.variance = spec.at("reg_noise").value("variance", 1.0);
    }
    return std::make_unique<LinearModelSource>(vector_from_json(spec.at("theta")), cov, noise);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed generator spec: ") + e.what(), 0, 0);
  }
}

json verdict_json(const Verdict& v) {
  json j;
  j["decision"] = to_string(v.decision);
  j["t_used"] = v.t_used;
  j["l_hat"] = v.l_hat;
  j["gamma_s"] = v.gamma_s;
  j["gamma_d"] = v.gamma_d;
  j["j_hat"] = v.j_hat;
  j["margin"] = v.margin;
  j["theta_hat"] = to_json(v.theta_hat);
  j["loss_bound_form"] = to_string(v.loss_bound_form);
  j["constants_used"] = v.constants_used;
  j["lambda_min"] = v.lambda_min ? json(*v.lambda_min) : json(nullptr);
  j["lambda_min_estimated"] = v.lambda_min_estimated;
  j["solver_iterations"] = v.solver_iterations;
  j["solver_converged"] = v.solver_converged;
  j["validation_out_of_range"] = v.validation_out_of_range;
  j["warnings"] = v.warnings;
  return j;
}

int run_verify(const VerifyOptions& o, const Globals& g, const CLI::App* sub) {
  const ModelBounds bounds(o.zeta, o.tau, o.radius);
  Dataset survey = load_csv(o.survey, bounds);
  const ValidationReport report = validate_dataset(survey);
  if (!report.ok()) {
    throw PreconditionError("survey violates the declared bounds in " +
                            std::to_string(report.violations.size()) + " cells");
  }
  auto source = open_validation(o.validation, bounds);

  TestConfig cfg(bounds);
  cfg.kappa = o.kappa;
  cfg.tol = o.tol;
  cfg.delta = o.delta;
  cfg.loss_bound_form = parse_loss_bound_form(o.loss_bound_form);
  cfg.constants = {{"c2", o.c2}, {"c_eps", o.c_eps}};

  const RngSpec rng{g.seed, 0};
  Verdict v;
  if (o.alpha) {
    const PrivacyParams privacy(*o.alpha, o.beta, parse_accounting(o.accounting));
    PrivateTestOptions opts;
    opts.lambda_min = o.lambda_min;
    opts.gaussian_formula = parse_gaussian_formula(o.gaussian_formula);
    v = priverify(survey, *source, cfg, privacy, opts, rng);
  } else {
    v = surverify(survey, *source, cfg, rng);
  }
  for (const auto& w : v.warnings) note(g, "warning: " + w);

  if (g.format == "csv") {
    std::string text = "decision,margin,l_hat,gamma_s,gamma_d,j_hat,t_used\n";
    text += csv_line({to_string(v.decision), format_double(v.margin), format_double(v.l_hat),
                      format_double(v.gamma_s), format_double(v.gamma_d),
                      format_double(v.j_hat), std::to_string(v.t_used)});
    emit_text(text, g.output);
  } else {
    json j = verdict_json(v);
    j["mode"] = o.alpha ? "private" : "public";
    j["manifest"] = manifest(sub, g);
    emit_json(j, g.output);
  }
  note(g, to_string(v.decision));
  return v.decision == Decision::Reject ? kExitReject : kExitOk;
}

// bounds ---------------------------------------------------------------------

struct BoundsOptions {
  std::string name;
  double n = 100.0;
  double m = 1000.0;
  double t = 0.1;
  int d = 2;
  int d1 = 1;
  int d2 = 1;
  double zeta = 1.0;
  double alpha = 1.0;
  double beta = 0.5;
  double lambda_min = 1.0;
  double radius = 1.0;
  double c = 1.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c_x = 1.0;
  double c_w = 1.0;
  double c_eps = 1.0;
  double sigma_eps = 1.0;
  std::optional<double> c_max;
  double shape = 2.0;
  double c_alpha = 1.0;
  double sigma_minus_sq = 1.0;
  double beta_split = 0.5;
  double second_moment = 1.0;
  double tau = 1.0;
  double delta = 0.1;
  double tol = 0.1;
  double l_hat = 0.0;
  std::string loss_bound_form = "log-d";
};

const std::vector<std::string> kBoundNames = {
    "min-samples-gaussian",     "min-samples-laplace",
    "error-bound-gaussian",     "error-bound-laplace",
    "lower-re",                 "subweibull-right-tail",
    "squared-subexp-tail",      "squared-subexp-tail-three-term",
    "one-sided-bernstein",      "matrix-deviation",
    "matrix-deviation-level",   "validation-sample-size",
    "survey-loss-bound",        "privacy-penalty-gaussian",
    "privacy-penalty-laplace"};

json evaluate_bound(const BoundsOptions& o) {
  namespace b = ldpsurvey::bounds;
  const b::SpectrumInfo spec{o.lambda_min};
  const b::TailParams tails{o.c_x, o.c_w, o.c_eps, o.sigma_eps};
  const std::string& name = o.name;

  auto plain = [](double value, json constants) {
    return json{{"value", value},
                {"vacuous", false},
                {"side_conditions", json::object()},
                {"constants_used", std::move(constants)}};
  };
  auto from = [](const b::BoundResult& r) {
    return json{{"value", r.value},
                {"vacuous", r.vacuous},
                {"side_conditions", r.side_conditions},
                {"constants_used", r.constants_used}};
  };

  if (name == "min-samples-gaussian") {
    spec.check();
    return plain(static_cast<double>(
                     b::min_samples_gaussian(spec, o.zeta, o.alpha, o.beta, o.d, o.c)),
                 {{"c", o.c}});
  }
  if (name == "min-samples-laplace") {
    spec.check();
    return plain(static_cast<double>(
                     b::min_samples_laplace(spec, o.zeta, o.alpha, o.c_eps, o.d)),
                 json::object());
  }
  if (name == "error-bound-gaussian") {
    return plain(b::error_bound_gaussian(tails, spec, o.zeta, o.alpha, o.beta, o.radius,
                                         o.d, o.m, o.c2),
                 {{"c2", o.c2}});
  }
  if (name == "error-bound-laplace") {
    return plain(b::error_bound_laplace(tails, spec, o.zeta, o.alpha, o.radius, o.d, o.m,
                                        o.c2),
                 {{"c2", o.c2}});
  }
  if (name == "lower-re") {
    const double c_max = o.c_max.value_or(tails.c_max());
    const b::LowerREParams p = b::lower_re_params(spec, c_max, o.m, o.d, o.c1);
    json j = plain(p.tau_md, {{"c1", o.c1}});
    j["alpha_ell"] = p.alpha_ell;
    j["tau_md"] = p.tau_md;
    j["side_conditions"] = {{"tau_md_le_alpha_ell_over_2d", p.feasible}};
    return j;
  }
  if (name == "subweibull-right-tail") {
    return from(b::subweibull_right_tail(o.n, o.t, o.shape, o.c_alpha, o.sigma_minus_sq,
                                         o.beta_split));
  }
  if (name == "squared-subexp-tail") return from(b::squared_subexp_tail(o.n, o.t, o.c_x, o.c));
  if (name == "squared-subexp-tail-three-term") {
    return from(b::squared_subexp_tail_three_term(o.n, o.t, o.c_x, o.c));
  }
  if (name == "one-sided-bernstein") {
    return from(b::one_sided_bernstein(o.n, o.t, o.second_moment));
  }
  if (name == "matrix-deviation") {
    return from(b::matrix_deviation_bound(o.n, o.d1, o.d2, o.c_max.value_or(tails.c_max()),
                                          o.t, o.c));
  }
  if (name == "matrix-deviation-level") {
    return plain(b::matrix_deviation_level(o.n, o.d, o.c_max.value_or(tails.c_max()), o.c1),
                 {{"c1", o.c1}});
  }
  if (name == "validation-sample-size") {
    return plain(static_cast<double>(validation_sample_size(o.tau, o.delta, o.tol)),
                 json::object());
  }
  if (name == "survey-loss-bound") {
    return plain(survey_loss_bound(o.l_hat, static_cast<std::size_t>(o.m),
                                   static_cast<std::size_t>(o.d),
                                   ModelBounds(o.zeta, o.tau, o.radius), o.delta,
                                   parse_loss_bound_form(o.loss_bound_form)),
                 json::object());
  }
  if (name == "privacy-penalty-gaussian") {
    return plain(privacy_penalty_gaussian(ModelBounds(o.zeta, o.tau, o.radius), o.alpha,
                                          o.beta, o.lambda_min, o.m,
                                          static_cast<std::size_t>(o.d), o.c2),
                 {{"c2", o.c2}});
  }
  if (name == "privacy-penalty-laplace") {
    return plain(privacy_penalty_laplace(ModelBounds(o.zeta, o.tau, o.radius), o.alpha,
                                         o.c_eps, o.lambda_min, o.m,
                                         static_cast<std::size_t>(o.d), o.c2),
                 {{"c2", o.c2}});
  }
  throw PreconditionError("unknown bound '" + name + "'");
}

int run_bounds(const BoundsOptions& o, const Globals& g, const CLI::App* sub) {
  json j = evaluate_bound(o);
  j["name"] = o.name;
  if (g.format == "csv") {
    emit_text("name,value,vacuous\n" +
                  csv_line({o.name, format_double(j["value"].get<double>()),
                            j["vacuous"].get<bool>() ? "true" : "false"}),
              g.output);
    return kExitOk;
  }
  j["manifest"] = manifest(sub, g);
  emit_json(j, g.output);
  return kExitOk;
}

// sweep ----------------------------------------------------------------------

struct SweepOptions {
  std::string experiment = "model-distance";
  SweepSpec spec;
};

int run_sweep_cmd(SweepOptions o, const Globals& g, const CLI::App* sub) {
  if (g.output.empty()) throw PreconditionError("sweep needs --output <dir>");
  o.spec.experiment = parse_experiment(o.experiment);
  o.spec.seed = g.seed;
  const SweepOutput out = run_sweep(o.spec);
  write_sweep(out, g.output, manifest(sub, g));
  if (!g.quiet) std::cerr << out.summary.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Private survey publishing, errors-in-variables fitting and model "
               "credibility testing"};
  app.require_subcommand(1);
  // Global flags may follow the subcommand.
  app.fallthrough();
  app.option_defaults()->always_capture_default()->multi_option_policy(
      CLI::MultiOptionPolicy::TakeLast);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.set_version_flag("--version", kVersion);

  Globals g;
  app.add_option("--seed", g.seed, "Root seed for all randomness");
  app.add_option("-o,--output", g.output, "Primary output path (stdout when omitted)");
  app.add_option("--format", g.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_flag("-q,--quiet", g.quiet, "Suppress notes and warnings on stderr");
  app.set_config("--config", "", "JSON file whose keys mirror the flags");
  app.config_formatter(std::make_shared<ldpsurvey::cli::JsonConfig>(&app));

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate synthetic surveys");
  gen_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"synthetic1", "synthetic2"}));
  gen_cmd->add_option("--d", gen.d)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--m", gen.m)->check(CLI::PositiveNumber);
  gen_cmd->add_option("--mu", gen.mu);
  gen_cmd->add_option("--noise", gen.noise)->check(CLI::IsMember({"gaussian", "laplace"}));
  gen_cmd->add_option("--out", gen.out, "Output prefix");

  PublishOptions pub;
  auto* pub_cmd = app.add_subcommand("publish", "Privatize covariates of a survey CSV");
  pub_cmd->add_option("--input", pub.input)->required()->check(CLI::ExistingFile);
  pub_cmd->add_option("--output", pub.output, "Published CSV (sidecar goes to <csv>.json)");
  pub_cmd->add_option("--alpha", pub.alpha);
  pub_cmd->add_option("--beta", pub.beta);
  pub_cmd->add_option("--zeta", pub.zeta);
  pub_cmd->add_option("--tau", pub.tau, "Optional response bound to check");
  pub_cmd->add_option("--accounting", pub.accounting)
      ->check(CLI::IsMember({"per-coord", "whole-record"}));
  pub_cmd->add_option("--gaussian-formula", pub.gaussian_formula)
      ->check(CLI::IsMember({"standard", "algorithm", "prose"}));
  pub_cmd->add_option("--formula-constant", pub.formula_constant);

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit the bias-corrected l1 regression");
  fit_cmd->add_option("--input", fit.input)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--sigma-w", fit.sigma_w,
                      "Noise variance per coordinate, or from-sidecar");
  fit_cmd->add_option("--mode", fit.mode)->check(CLI::IsMember({"constrained", "lagrangian"}));
  fit_cmd->add_option("--radius", fit.radius);
  fit_cmd->add_option("--lambda", fit.lambda);
  fit_cmd->add_option("--radius-guard", fit.radius_guard);
  fit_cmd->add_option("--max-iter", fit.max_iter)->check(CLI::PositiveNumber);
  fit_cmd->add_option("--tol", fit.tol);
  fit_cmd->add_option("--c-pen", fit.c_pen, "Multiplier of the default penalty");

  VerifyOptions ver;
  auto* ver_cmd = app.add_subcommand("verify", "Test a survey model against the population");
  ver_cmd->add_option("--survey", ver.survey)->required()->check(CLI::ExistingFile);
  ver_cmd->add_option("--validation", ver.validation, "CSV sample or generator-spec JSON")
      ->required()
      ->check(CLI::ExistingFile);
  ver_cmd->add_option("--kappa", ver.kappa);
  ver_cmd->add_option("--tol", ver.tol);
  ver_cmd->add_option("--delta", ver.delta);
  ver_cmd->add_option("--tau", ver.tau);
  ver_cmd->add_option("--radius", ver.radius);
  ver_cmd->add_option("--zeta", ver.zeta);
  ver_cmd->add_option("--loss-bound-form", ver.loss_bound_form)
      ->check(CLI::IsMember({"log-d", "sqrt-d-plus-1"}));
  ver_cmd->add_option("--alpha", ver.alpha, "Privatize the survey first");
  ver_cmd->add_option("--beta", ver.beta);
  ver_cmd->add_option("--lambda-min", ver.lambda_min);
  ver_cmd->add_option("--accounting", ver.accounting)
      ->check(CLI::IsMember({"per-coord", "whole-record"}));
  ver_cmd->add_option("--gaussian-formula", ver.gaussian_formula)
      ->check(CLI::IsMember({"standard", "algorithm", "prose"}));
  ver_cmd->add_option("--c2", ver.c2);
  ver_cmd->add_option("--c-eps", ver.c_eps);

  BoundsOptions bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "Evaluate a named bound");
  bnd_cmd->add_option("--name", bnd.name)->required()->check(CLI::IsMember(kBoundNames));
  bnd_cmd->add_option("--n", bnd.n);
  bnd_cmd->add_option("--m", bnd.m);
  bnd_cmd->add_option("--t", bnd.t);
  bnd_cmd->add_option("--d", bnd.d);
  bnd_cmd->add_option("--d1", bnd.d1);
  bnd_cmd->add_option("--d2", bnd.d2);
  bnd_cmd->add_option("--zeta", bnd.zeta);
  bnd_cmd->add_option("--alpha", bnd.alpha);
  bnd_cmd->add_option("--beta", bnd.beta);
  bnd_cmd->add_option("--lambda-min", bnd.lambda_min);
  bnd_cmd->add_option("--radius", bnd.radius);
  bnd_cmd->add_option("--c", bnd.c);
  bnd_cmd->add_option("--c1", bnd.c1);
  bnd_cmd->add_option("--c2", bnd.c2);
  bnd_cmd->add_option("--c-x", bnd.c_x);
  bnd_cmd->add_option("--c-w", bnd.c_w);
  bnd_cmd->add_option("--c-eps", bnd.c_eps);
  bnd_cmd->add_option("--sigma-eps", bnd.sigma_eps);
  bnd_cmd->add_option("--c-max", bnd.c_max);
  bnd_cmd->add_option("--shape", bnd.shape);
  bnd_cmd->add_option("--c-alpha", bnd.c_alpha);
  bnd_cmd->add_option("--sigma-minus-sq", bnd.sigma_minus_sq);
  bnd_cmd->add_option("--beta-split", bnd.beta_split);
  bnd_cmd->add_option("--second-moment", bnd.second_moment);
  bnd_cmd->add_option("--tau", bnd.tau);
  bnd_cmd->add_option("--delta", bnd.delta);
  bnd_cmd->add_option("--tol", bnd.tol);
  bnd_cmd->add_option("--l-hat", bnd.l_hat);
  bnd_cmd->add_option("--loss-bound-form", bnd.loss_bound_form)
      ->check(CLI::IsMember({"log-d", "sqrt-d-plus-1"}));

  SweepOptions sw;
  auto* sw_cmd = app.add_subcommand("sweep", "Run an experiment grid");
  sw_cmd->add_option("--experiment", sw.experiment)
      ->check(CLI::IsMember({"model-distance", "error-vs-samples", "noise-comparison"}));
  sw_cmd->add_option("--trials", sw.spec.trials)->check(CLI::PositiveNumber);
  sw_cmd->add_option("--d", sw.spec.d)->check(CLI::PositiveNumber);
  sw_cmd->add_option("--workers", sw.spec.workers, "0 uses every core");
  sw_cmd->add_option("--mu-grid", sw.spec.mu_grid)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw_cmd->add_option("--tol-grid", sw.spec.tol_grid)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw_cmd->add_option("--m-survey", sw.spec.m_survey)->check(CLI::PositiveNumber);
  sw_cmd->add_option("--kappa", sw.spec.kappa);
  sw_cmd->add_option("--delta", sw.spec.delta);
  sw_cmd->add_option("--m-grid", sw.spec.m_grid)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw_cmd->add_option("--alpha-grid", sw.spec.alpha_grid)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw_cmd->add_option("--beta", sw.spec.beta);
  sw_cmd->add_option("--zeta", sw.spec.zeta);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen(gen, g, gen_cmd);
    if (pub_cmd->parsed()) return run_publish(pub, g, pub_cmd);
    if (fit_cmd->parsed()) return run_fit(fit, g, fit_cmd);
    if (ver_cmd->parsed()) return run_verify(ver, g, ver_cmd);
    if (bnd_cmd->parsed()) return run_bounds(bnd, g, bnd_cmd);
    if (sw_cmd->parsed()) return run_sweep_cmd(sw, g, sw_cmd);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
