#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace ldpsurvey {

struct SweepSpec {
  enum class Experiment {
    // Tester accept/reject rates over a mu grid and a tolerance grid.
    ModelDistance,
    // Normalized estimation error of the private fit over m and alpha grids.
    ErrorVsSamples,
    // Gaussian vs Laplace covariate noise at matched variance over an m grid.
    NoiseComparison,
  };

  Experiment experiment = Experiment::ModelDistance;
  int trials = 20;
  std::uint64_t seed = 0;
  std::size_t d = 10;
  unsigned workers = 0;  // 0 = hardware concurrency

  // ModelDistance
  std::vector<double> mu_grid{0.0, 2.0};
  std::vector<double> tol_grid{0.1};
  std::size_t m_survey = 10000;
  double kappa = 0.0;
  double delta = 0.1;

  // ErrorVsSamples and NoiseComparison
  std::vector<std::size_t> m_grid{1000, 10000, 100000};
  std::vector<double> alpha_grid{2.0};
  double beta = 0.0;
  // Half-width of the uniform covariates in ErrorVsSamples.
  double zeta = 1.0;

  void check() const;
};

struct SweepOutput {
  std::vector<std::string> columns;
  // One row per trial per grid point, in canonical grid-then-trial order.
  std::vector<std::vector<std::string>> rows;
  nlohmann::json summary;

  std::string csv() const;
};

SweepOutput run_sweep(const SweepSpec& spec);

// Writes trials.csv and summary.json (with manifest merged in) to dir.
void write_sweep(const SweepOutput& out, const std::string& dir,
                 const nlohmann::json& manifest);

// Ordinary least-squares slope of ys on xs.
double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys);

std::string to_string(SweepSpec::Experiment e);
SweepSpec::Experiment parse_experiment(const std::string& text);

}  // namespace ldpsurvey
