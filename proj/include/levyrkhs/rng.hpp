#pragma once

#include <cmath>
#include <cstdint>

namespace levyrkhs {

/// Small deterministic generator with splittable per-stream seeding so that
/// parallel simulations stay seed-stable regardless of thread count.  Engine:
/// xoshiro256** seeded through SplitMix64 from (seed, stream id).
class StreamRng {
public:
  StreamRng(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return 1.0 - uniform(); }

  double normal(double mean, double stddev) {
    if (has_spare_) {
      has_spare_ = false;
      return mean + stddev * spare_;
    }
    const double u = uniform_pos();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * M_PI * v);
    has_spare_ = true;
    return mean + stddev * r * std::cos(2.0 * M_PI * v);
  }

  double laplace(double location, double scale) {
    const double u = uniform() - 0.5;
    const double mag = 1.0 - 2.0 * std::abs(u);  // in (0, 1]
    return location - scale * std::copysign(std::log(mag), -u);
  }

  /// Knuth's product method; intended for small means (mean jump counts per
  /// step are << 1 here).
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    int k = 0;
    double prod = 1.0;
    do {
      prod *= uniform_pos();
      ++k;
    } while (prod > limit);
    return k - 1;
  }

private:
  static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levyrkhs
