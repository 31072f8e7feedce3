#pragma once

#include <cstdint>

namespace mckle {

// Keyed SplitMix64 counter generator.
//
//   mix(z):  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//            return z ^ (z >> 31)
//   key    = mix(seed ^ mix(stream + 0x9E3779B97F4A7C15))
//   draw i = mix(key + (i + 1) * 0x9E3779B97F4A7C15)      (i = 0, 1, ...)
//   uniform = ((draw >> 11) + 0.5) * 2^-53                 (open interval (0,1))
//
// The state is the pair (key, counter), so independent streams for parallel
// replicates come from (seed, stream) without any shared state, and the
// sequence is trivially reproducible in any language with 64-bit integers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1).
  double uniform();

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix(std::uint64_t z);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream id for the (a, b)-th member of a two-level family of streams, e.g.
// (sample-size index, replicate index).
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b);

}  // namespace mckle
