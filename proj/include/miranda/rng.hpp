#pragma once

#include <cstdint>

namespace miranda {

// splitmix64 stream. <random> distributions are implementation-defined, so all
// seeded draws in this project go through this generator to keep certificates
// byte-identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in the open interval (0, 1); never returns an exact endpoint.
  double next_open01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Uniform in the open interval (-1, 1).
  double next_symmetric() { return 2.0 * next_open01() - 1.0; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_open01(); }

  // Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  std::uint64_t state_;
};

// Decorrelates substreams (e.g. proposal attempts) drawn from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0x632be59bd9b4e019ull * (stream + 1)));
  return g.next_u64();
}

}  // namespace miranda
