#include "ldpsurvey/sweep.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "ldpsurvey/csv_io.h"
#include "ldpsurvey/datagen.h"
#include "ldpsurvey/errors.h"
#include "ldpsurvey/mechanisms.h"
#include "ldpsurvey/solver.h"
#include "ldpsurvey/tester.h"

namespace ldpsurvey {
namespace {

void run_pool(std::size_t count, unsigned workers,
              const std::function<void(std::size_t)>& task) {
  unsigned n = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
  n = static_cast<unsigned>(std::min<std::size_t>(n, count));
  if (n <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) task(i);
    });
  }
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::string fmt(double v) { return format_double(v); }

double normalized_error(const CoefficientVector& estimate,
                        const CoefficientVector& truth) {
  return (estimate - truth).norm() / truth.norm();
}

// Outcome of one (grid point, trial) task.
struct TrialOutcome {
  std::vector<std::vector<std::string>> rows;
  std::vector<double> values;
  std::vector<int> decisions;
  std::string error;
};

void record_errors(nlohmann::json& point, const std::vector<TrialOutcome>& trials) {
  std::vector<std::string> errors;
  for (const auto& t : trials) {
    if (!t.error.empty()) errors.push_back(t.error);
  }
  point["aborted"] = !errors.empty();
  if (!errors.empty()) point["errors"] = errors;
}

SweepOutput model_distance_sweep(const SweepSpec& spec, const RngSpec& base) {
  SweepOutput out;
  out.columns = {"mu", "tol", "trial", "decision", "margin", "l_hat", "gamma_s",
                 "gamma_d", "t_used", "model_distance", "error"};
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  std::vector<TrialOutcome> outcomes(spec.mu_grid.size() * trials);

  run_pool(outcomes.size(), spec.workers, [&](std::size_t task) {
    const std::size_t g = task / trials;
    const std::size_t trial = task % trials;
    const double mu = spec.mu_grid[g];
    const RngSpec rng = base.derive(g).derive(trial);
    TrialOutcome& o = outcomes[task];
    try {
      Synthetic1 data = gen_synthetic1(spec.d, spec.m_survey, mu, rng.derive(0));
      const ModelBounds env = data.survey.bounds();
      auto [survey, clip] = clip_to_bounds(data.survey, env.zeta(), env.tau());
      validate_dataset(survey);
      const double distance = (data.theta_star - data.theta_s).norm();
      for (double tol : spec.tol_grid) {
        TestConfig cfg(env);
        cfg.kappa = spec.kappa;
        cfg.tol = tol;
        cfg.delta = spec.delta;
        LinearModelSource source = data.star_sampler;
        const Verdict v = surverify(survey, source, cfg, rng.derive(1));
        o.decisions.push_back(v.decision == Decision::Reject ? 1 : 0);
        o.values.push_back(distance);
        o.rows.push_back({fmt(mu), fmt(tol), std::to_string(trial), to_string(v.decision),
                          fmt(v.margin), fmt(v.l_hat), fmt(v.gamma_s), fmt(v.gamma_d),
                          std::to_string(v.t_used), fmt(distance), ""});
      }
    } catch (const std::exception& e) {
      o.error = e.what();
      o.rows.clear();
      for (double tol : spec.tol_grid) {
        o.rows.push_back({fmt(mu), fmt(tol), std::to_string(trial), "", "", "", "", "",
                          "", "", e.what()});
      }
    }
  });

  nlohmann::json points = nlohmann::json::array();
  for (std::size_t g = 0; g < spec.mu_grid.size(); ++g) {
    const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(g * trials);
    const std::vector<TrialOutcome> group(first, first + static_cast<std::ptrdiff_t>(trials));
    for (std::size_t k = 0; k < spec.tol_grid.size(); ++k) {
      nlohmann::json point;
      point["mu"] = spec.mu_grid[g];
      point["tol"] = spec.tol_grid[k];
      record_errors(point, group);
      if (!point["aborted"].get<bool>()) {
        double rejects = 0.0;
        std::vector<double> distances;
        for (const auto& t : group) {
          rejects += t.decisions[k];
          distances.push_back(t.values[k]);
        }
        point["reject_rate"] = rejects / static_cast<double>(trials);
        point["accept_rate"] = 1.0 - rejects / static_cast<double>(trials);
        point["mean_model_distance"] = mean(distances);
      }
      points.push_back(point);
    }
    for (const auto& t : group) {
      out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
    }
  }
  // Canonical order is (mu, tol, trial).
  std::stable_sort(out.rows.begin(), out.rows.end(), [&](const auto& a, const auto& b) {
    const double ma = std::stod(a[0]), mb = std::stod(b[0]);
    const auto ia = std::find(spec.mu_grid.begin(), spec.mu_grid.end(), ma) - spec.mu_grid.begin();
    const auto ib = std::find(spec.mu_grid.begin(), spec.mu_grid.end(), mb) - spec.mu_grid.begin();
    if (ia != ib) return ia < ib;
    const auto ta = std::find(spec.tol_grid.begin(), spec.tol_grid.end(), std::stod(a[1])) - spec.tol_grid.begin();
    const auto tb = std::find(spec.tol_grid.begin(), spec.tol_grid.end(), std::stod(b[1])) - spec.tol_grid.begin();
    return ta < tb;
  });
  out.summary["grid"] = points;
  return out;
}

SweepOutput error_vs_samples_sweep(const SweepSpec& spec, const RngSpec& base) {
  SweepOutput out;
  out.columns = {"alpha", "beta", "m", "trial", "normalized_error", "iterations",
                 "converged", "error"};
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t n_m = spec.m_grid.size();
  const std::size_t points = spec.alpha_grid.size() * n_m;
  std::vector<TrialOutcome> outcomes(points * trials);

  run_pool(outcomes.size(), spec.workers, [&](std::size_t task) {
    const std::size_t g = task / trials;
    const std::size_t trial = task % trials;
    const double alpha = spec.alpha_grid[g / n_m];
    const std::size_t m = spec.m_grid[g % n_m];
    const RngSpec rng = base.derive(g).derive(trial);
    TrialOutcome& o = outcomes[task];
    try {
      const BoundedSparse data = gen_bounded_sparse(spec.d, m, spec.zeta, rng.derive(0));
      const PrivacyParams privacy(alpha, spec.beta);
      const NoiseCalibration cal = make_noise_spec(privacy, spec.zeta, spec.d);
      const PrivateDataset pds = privatize(data.survey, cal.spec, privacy, rng.derive(1));
      const SolveResult fit = solve(corrected_moments(pds),
                                    SolverConfig::constrained(data.theta_star.lpNorm<1>()));
      const double err = normalized_error(fit.theta_hat, data.theta_star);
      o.values.push_back(err);
      o.rows.push_back({fmt(alpha), fmt(spec.beta), std::to_string(m), std::to_string(trial),
                        fmt(err), std::to_string(fit.iterations),
                        fit.converged ? "true" : "false", ""});
    } catch (const std::exception& e) {
      o.error = e.what();
      o.rows = {{fmt(alpha), fmt(spec.beta), std::to_string(m), std::to_string(trial), "",
                 "", "", e.what()}};
    }
  });

  nlohmann::json grid = nlohmann::json::array();
  nlohmann::json slopes = nlohmann::json::array();
  for (std::size_t a = 0; a < spec.alpha_grid.size(); ++a) {
    std::vector<double> log_m;
    std::vector<double> log_err;
    bool complete = true;
    for (std::size_t k = 0; k < n_m; ++k) {
      const std::size_t g = a * n_m + k;
      const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(g * trials);
      const std::vector<TrialOutcome> group(first, first + static_cast<std::ptrdiff_t>(trials));
      nlohmann::json point;
      point["alpha"] = spec.alpha_grid[a];
      point["beta"] = spec.beta;
      point["m"] = spec.m_grid[k];
      record_errors(point, group);
      if (!point["aborted"].get<bool>()) {
        std::vector<double> errs;
        for (const auto& t : group) errs.push_back(t.values[0]);
        point["mean_normalized_error"] = mean(errs);
        point["sd_normalized_error"] = stddev(errs);
        log_m.push_back(std::log(static_cast<double>(spec.m_grid[k])));
        log_err.push_back(std::log(mean(errs)));
      } else {
        complete = false;
      }
      grid.push_back(point);
      for (const auto& t : group) out.rows.insert(out.rows.end(), t.rows.begin(), t.rows.end());
    }
    nlohmann::json s;
    s["alpha"] = spec.alpha_grid[a];
    s["points_used"] = log_m.size();
    s["complete"] = complete;
    if (log_m.size() >= 2) s["log_log_slope"] = ols_slope(log_m, log_err);
    slopes.push_back(s);
  }
  out.summary["grid"] = grid;
  out.summary["slopes"] = slopes;
  return out;
}

SweepOutput noise_comparison_sweep(const SweepSpec& spec, const RngSpec& base) {
  SweepOutput out;
  out.columns = {"noise", "m", "trial", "normalized_error", "iterations", "converged",
                 "error"};
  const std::size_t trials = static_cast<std::size_t>(spec.trials);
  const std::size_t n_m = spec.m_grid.size();
  const NoiseSpec::Kind kinds[] = {NoiseSpec::Kind::Gaussian, NoiseSpec::Kind::Laplace};
  // Task = (m, trial); both noise kinds share the trial's streams.
  std::vector<TrialOutcome> outcomes(n_m * trials);

  run_pool(outcomes.size(), spec.workers, [&](std::size_t task) {
    const std::size_t g = task / trials;
    const std::size_t trial = task % trials;
    const std::size_t m = spec.m_grid[g];
    const RngSpec rng = base.derive(g).derive(trial);
    TrialOutcome& o = outcomes[task];
    try {
      for (const auto kind : kinds) {
        const Synthetic2 data = gen_synthetic2(spec.d, m, kind, rng, true);
        const SolveResult fit =
            solve(corrected_moments(data.noisy),
                  SolverConfig::constrained(data.theta_star.lpNorm<1>()));
        const double err = normalized_error(fit.theta_hat, data.theta_star);
        o.values.push_back(err);
        o.rows.push_back({to_string(kind), std::to_string(m), std::to_string(trial),
                          fmt(err), std::to_string(fit.iterations),
                          fit.converged ? "true" : "false", ""});
      }
    } catch (const std::exception& e) {
      o.error = e.what();
      o.rows.clear();
      for (const auto kind : kinds) {
        o.rows.push_back({to_string(kind), std::to_string(m), std::to_string(trial), "",
                          "", "", e.what()});
      }
    }
  });

  nlohmann::json grid = nlohmann::json::array();
  std::vector<std::vector<std::string>> gaussian_rows;
  std::vector<std::vector<std::string>> laplace_rows;
  for (std::size_t g = 0; g < n_m; ++g) {
    const auto first = outcomes.begin() + static_cast<std::ptrdiff_t>(g * trials);
    const std::vector<TrialOutcome> group(first, first + static_cast<std::ptrdiff_t>(trials));
    nlohmann::json point;
    point["m"] = spec.m_grid[g];
    record_errors(point, group);
    if (!point["aborted"].get<bool>()) {
      std::vector<double> gauss;
      std::vector<double> lap;
      for (const auto& t : group) {
        gauss.push_back(t.values[0]);
        lap.push_back(t.values[1]);
      }
      point["mean_error_gaussian"] = mean(gauss);
      point["mean_error_laplace"] = mean(lap);
      point["gaussian_le_laplace"] = mean(gauss) <= mean(lap);
    }
    grid.push_back(point);
    for (const auto& t : group) {
      gaussian_rows.push_back(t.rows[0]);
      laplace_rows.push_back(t.rows[1]);
    }
  }
  out.rows = gaussian_rows;
  out.rows.insert(out.rows.end(), laplace_rows.begin(), laplace_rows.end());
  out.summary["grid"] = grid;
  return out;
}

}  // namespace

void SweepSpec::check() const {
  if (trials < 1) throw PreconditionError("trials must be at least 1");
  if (d == 0) throw PreconditionError("d must be at least 1");
  switch (experiment) {
    case Experiment::ModelDistance:
      if (mu_grid.empty() || tol_grid.empty()) {
        throw PreconditionError("model-distance sweep needs non-empty mu and tol grids");
      }
      if (m_survey == 0) throw PreconditionError("m_survey must be positive");
      break;
    case Experiment::ErrorVsSamples:
      if (alpha_grid.empty()) throw PreconditionError("alpha grid is empty");
      [[fallthrough]];
    case Experiment::NoiseComparison:
      if (m_grid.empty()) throw PreconditionError("m grid is empty");
      if (std::find(m_grid.begin(), m_grid.end(), 0u) != m_grid.end()) {
        throw PreconditionError("m grid entries must be positive");
      }
      break;
  }
}

SweepOutput run_sweep(const SweepSpec& spec) {
  spec.check();
  const auto index = static_cast<std::uint64_t>(spec.experiment);
  const RngSpec base = RngSpec{spec.seed, 0}.derive(index);
  SweepOutput out;
  switch (spec.experiment) {
    case SweepSpec::Experiment::ModelDistance:
      out = model_distance_sweep(spec, base);
      break;
    case SweepSpec::Experiment::ErrorVsSamples:
      out = error_vs_samples_sweep(spec, base);
      break;
    case SweepSpec::Experiment::NoiseComparison:
      out = noise_comparison_sweep(spec, base);
      break;
  }
  out.summary["experiment"] = to_string(spec.experiment);
  out.summary["trials"] = spec.trials;
  return out;
}

std::string SweepOutput::csv() const {
  std::ostringstream ss;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    ss << (i ? "," : "") << columns[i];
  }
  ss << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string cell = row[i];
      // Error messages are the only free text; keep the CSV rectangular.
      std::replace(cell.begin(), cell.end(), ',', ';');
      std::replace(cell.begin(), cell.end(), '\n', ' ');
      ss << (i ? "," : "") << cell;
    }
    ss << '\n';
  }
  return ss.str();
}

void write_sweep(const SweepOutput& out, const std::string& dir,
                 const nlohmann::json& manifest) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path root(dir);
  {
    std::ofstream csv(root / "trials.csv", std::ios::binary);
    if (!csv) throw Error("cannot write trials.csv in '" + dir + "'");
    csv << out.csv();
  }
  nlohmann::json summary = out.summary;
  summary["manifest"] = manifest;
  write_json_file(summary, (root / "summary.json").string());
}

double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw PreconditionError("ols_slope needs at least two paired points");
  }
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw PreconditionError("ols_slope: xs are all equal");
  return sxy / sxx;
}

std::string to_string(SweepSpec::Experiment e) {
  switch (e) {
    case SweepSpec::Experiment::ModelDistance:
      return "model-distance";
    case SweepSpec::Experiment::ErrorVsSamples:
      return "error-vs-samples";
    case SweepSpec::Experiment::NoiseComparison:
      return "noise-comparison";
  }
  return "model-distance";
}

SweepSpec::Experiment parse_experiment(const std::string& text) {
  if (text == "model-distance") return SweepSpec::Experiment::ModelDistance;
  if (text == "error-vs-samples") return SweepSpec::Experiment::ErrorVsSamples;
  if (text == "noise-comparison") return SweepSpec::Experiment::NoiseComparison;
  throw PreconditionError("unknown experiment '" + text + "'");
}

}  // namespace ldpsurvey
