#pragma once

#include <cstdint>
#include <random>

namespace bridgelab {

/// Reproducible random stream. The engine is a 64-bit Mersenne twister whose
/// state is derived from (seed, stream) through std::seed_seq, so path i of a
/// run seeded with s always uses stream (s, i) no matter which worker draws it.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  // Standard normal by the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bridgelab
