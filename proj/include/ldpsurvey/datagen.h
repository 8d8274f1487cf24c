#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ldpsurvey/core.h"
#include "ldpsurvey/mechanisms.h"
#include "ldpsurvey/rng.h"
#include "ldpsurvey/tester.h"

namespace ldpsurvey {

// Per-coordinate covariate law.
struct CovariateDist {
  enum class Kind { StandardNormal, Uniform, ClippedNormal };
  Kind kind = Kind::StandardNormal;
  // Half-width for Uniform and ClippedNormal.
  double zeta = 1.0;

  double draw(RandomStream& rng) const;
};

// Regression noise. The second parameter is a variance throughout.
struct RegNoiseDist {
  enum class Kind { Gaussian, Laplace };
  Kind kind = Kind::Gaussian;
  double variance = 1.0;

  double draw(RandomStream& rng) const;
};

// Unlimited i.i.d. draws from y = <theta, x> + noise. The k-th point drawn
// over the source's lifetime comes from rng.derive(k) of the RngSpec handed
// to draw(), so repeated calls continue the sequence instead of replaying it.
class LinearModelSource : public ValidationSource {
 public:
  LinearModelSource(CoefficientVector theta, CovariateDist covariates,
                    RegNoiseDist noise);

  std::optional<std::size_t> available() const override { return std::nullopt; }
  std::vector<DataPoint> draw(std::size_t t, const RngSpec& rng) override;

  const CoefficientVector& theta() const { return theta_; }
  const CovariateDist& covariates() const { return covariates_; }
  const RegNoiseDist& noise() const { return noise_; }

 private:
  CoefficientVector theta_;
  CovariateDist covariates_;
  RegNoiseDist noise_;
  std::uint64_t drawn_ = 0;
};

// Generator recipe used by the gen command and the sweep harness.
struct GeneratorSpec {
  enum class Kind { Synthetic1, Synthetic2, LinearCustom };
  Kind kind = Kind::Synthetic1;
  std::size_t d = 10;
  // Synthetic1: mean of the reference-population coefficients.
  double mu = 0.0;
  // Synthetic2: covariate-noise family.
  NoiseSpec::Kind noise = NoiseSpec::Kind::Gaussian;
  // LinearCustom.
  CoefficientVector theta;
  CovariateDist covariates;
  RegNoiseDist reg_noise;
  RngSpec rng;

  void check() const;
};

// Synthetic_1 distribution parameters (all variances).
inline constexpr double kSynthetic1NoiseVariance = 0.1;
inline constexpr double kSynthetic1CoefVariance = 0.01;

// 4-sigma envelope for Synthetic_1 surveys of dimension d: zeta = 4,
// tau = 4 sd(y), radius = E||theta_S||_1 + 4 sd(||theta_S||_1).
ModelBounds synthetic1_envelope(std::size_t d);

struct Synthetic1 {
  Dataset survey;
  CoefficientVector theta_s;
  CoefficientVector theta_star;
  LinearModelSource star_sampler;
};

// Survey from theta_S ~ N(0, 0.01)^d, reference population from
// theta* ~ N(mu, 0.01)^d; x ~ N(0, 1)^d and noise N(0, 0.1) on both sides.
// The survey is not clipped; its bounds are synthetic1_envelope(d).
Synthetic1 gen_synthetic1(std::size_t d, std::size_t m_survey, double mu,
                          const RngSpec& rng);

// Each coordinate is Unif(1, 10) with probability 1/sqrt(d), else 0. With
// require_nonzero, all-zero draws are redrawn from successive sub-streams.
CoefficientVector sparse_coefficients(std::size_t d, const RngSpec& rng,
                                      bool require_nonzero = false);

struct Synthetic2 {
  Dataset clean;
  PrivateDataset noisy;
  CoefficientVector theta_star;
};

// x ~ N(0,1)^d, noise N(0,1), sparse theta*; covariate noise N(0,1) or
// Lap(0, 1/sqrt 2), both variance 1, drawn from the same uniforms so the two
// kinds are paired for equal rng.
Synthetic2 gen_synthetic2(std::size_t d, std::size_t m, NoiseSpec::Kind noise_kind,
                          const RngSpec& rng, bool require_nonzero = false);

struct ClipReport {
  // Clamps per covariate column, then one entry for the response.
  std::vector<std::size_t> per_column;
  std::size_t total() const;
};

// Clamps covariates to [-zeta, zeta] and responses to [-tau, tau]. The
// result carries bounds (zeta, tau, ds radius) and is not yet validated.
std::pair<Dataset, ClipReport> clip_to_bounds(const Dataset& ds, double zeta,
                                              double tau);

// Bounded-covariate sparse model: x ~ Unif[-zeta, zeta]^d, noise N(0,1),
// nonzero sparse theta*, tau = ||theta*||_1 zeta + 6, radius ||theta*||_1.
// Responses are clipped to tau; the dataset comes back validated.
struct BoundedSparse {
  Dataset survey;
  CoefficientVector theta_star;
  std::size_t clipped_responses = 0;
};
BoundedSparse gen_bounded_sparse(std::size_t d, std::size_t m, double zeta,
                                 const RngSpec& rng);

std::string to_string(CovariateDist::Kind kind);
std::string to_string(RegNoiseDist::Kind kind);
CovariateDist::Kind parse_covariate_kind(const std::string& text);
RegNoiseDist::Kind parse_reg_noise_kind(const std::string& text);
NoiseSpec::Kind parse_noise_kind(const std::string& text);

}  // namespace ldpsurvey
