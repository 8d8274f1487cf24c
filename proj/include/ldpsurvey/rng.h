#pragma once

#include <cstdint>

namespace ldpsurvey {

// Identifies a reproducible random stream. Equal (seed, stream) pairs yield
// bit-identical draws on every run and platform.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  // Child stream for a sub-task (row, trial, grid point, ...). Children of
  // distinct indices are independent of each other and of the parent.
  RngSpec derive(std::uint64_t index) const;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

// Counter-based SplitMix64 stream. Cheap to construct, so per-row streams
// cost nothing; all transforms are inverse-CDF from a single uniform draw.
class RandomStream {
 public:
  explicit RandomStream(const RngSpec& spec);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double standard_normal();
  double normal(double mean, double stddev);
  // Zero-mean Laplace with scale b (variance 2 b^2).
  double laplace(double scale);
  bool bernoulli(double p);

 private:
  std::uint64_t state_;
};

// Transforms of a uniform u in (0, 1); exposed so paired experiments can feed
// the same uniforms through different noise families.
double standard_normal_quantile(double u);
double laplace_quantile(double u, double scale);

}  // namespace ldpsurvey
