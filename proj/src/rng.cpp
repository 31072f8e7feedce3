#include "mckle/rng.hpp"

namespace mckle {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Rng::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + kGamma))) {}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGamma);
}

double Rng::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t stream_id(std::uint64_t a, std::uint64_t b) {
  return Rng::mix(a * kGamma + 0x632BE59BD9B4E019ULL) ^ b;
}

}  // namespace mckle
