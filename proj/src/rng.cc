#include "ldpsurvey/rng.h"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>

namespace ldpsurvey {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

RngSpec RngSpec::derive(std::uint64_t index) const {
  return RngSpec{seed, mix64(stream ^ mix64(index + kGolden))};
}

RandomStream::RandomStream(const RngSpec& spec)
    : state_(mix64(spec.seed ^ mix64(spec.stream ^ 0xD1B54A32D192ED03ULL))) {}

std::uint64_t RandomStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double RandomStream::uniform() {
  // 53 random bits, shifted half a ulp off zero.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

double RandomStream::standard_normal() {
  return standard_normal_quantile(uniform());
}

double RandomStream::normal(double mean, double stddev) {
  return mean + stddev * standard_normal();
}

double RandomStream::laplace(double scale) {
  return laplace_quantile(uniform(), scale);
}

bool RandomStream::bernoulli(double p) { return uniform() < p; }

double standard_normal_quantile(double u) {
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
}

double laplace_quantile(double u, double scale) {
  if (u < 0.5) return scale * std::log(2.0 * u);
  return -scale * std::log(2.0 * (1.0 - u));
}

}  // namespace ldpsurvey
