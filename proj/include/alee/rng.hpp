#pragma once

#include <array>
#include <cstdint>

namespace alee {

// Philox4x32-10 block cipher (Salmon et al., SC'11) with a 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Counter-based stream: output block i is philox(counter = (i, stream), key = seed).
// Identical (seed, stream) pairs reproduce the same sequence on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  // Uniform integer in [0, k).
  int uniform_int(int k);
  // Standard normal by inverse-CDF transform of uniform().
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace alee
