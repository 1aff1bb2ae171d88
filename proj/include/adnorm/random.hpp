#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace adnorm {

/// Seedable generator. One per harness run or per worker; never shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : seed_(seed) { reseed(0); }

  /// Independent substream derived from (seed, index); used for per-trial replay.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    Rng r(seed);
    r.reseed(index + 1);
    return r;
  }

  std::uint64_t seed() const noexcept { return seed_; }

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

  int uniform_int(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(engine_);
  }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  void reseed(std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      0x5eedu};
    engine_.seed(seq);
    normal_.reset();
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace adnorm
