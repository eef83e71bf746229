// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace certlab {

/// Seed plus stream id. Identical (seed, stream_id) pairs yield identical
/// sample sequences; distinct stream ids give independent streams, which is
/// what makes block-parallel Monte Carlo reproducible per seed.
struct RngSeed {
  std::uint64_t seed = 0;
  std::uint32_t stream_id = 0;

  RngSeed with_stream(std::uint32_t id) const { return RngSeed{seed, id}; }
  RngSeed substream(std::uint32_t offset) const { return RngSeed{seed, stream_id + offset}; }
};

class RngStream {
 public:
  explicit RngStream(RngSeed s) {
    std::seed_seq seq{static_cast<std::uint32_t>(s.seed & 0xffffffffu),
                      static_cast<std::uint32_t>(s.seed >> 32), s.stream_id};
    gen_.seed(seq);
  }
  RngStream(std::uint64_t seed, std::uint32_t stream_id) : RngStream(RngSeed{seed, stream_id}) {}

  std::mt19937_64& engine() { return gen_; }

  double uniform() { return unif_(gen_); }
  double normal() { return normal_(gen_); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
  }
  bool bernoulli(double p) { return std::bernoulli_distribution(p)(gen_); }
  /// Binomial draw; switches to the Gaussian limit for very large counts,
  /// where the exact law is indistinguishable at the precision we use.
  std::int64_t binomial(std::int64_t trials, double p) {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    const double mean = static_cast<double>(trials) * p;
    const double var = mean * (1.0 - p);
    if (trials > (1 << 24) && var > 1e4) {
      const double draw = mean + std::sqrt(var) * normal();
      const double clamped = std::min(std::max(draw, 0.0), static_cast<double>(trials));
      return static_cast<std::int64_t>(std::llround(clamped));
    }
    return std::binomial_distribution<std::int64_t>(trials, p)(gen_);
  }

 private:
  std::mt19937_64 gen_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace certlab
