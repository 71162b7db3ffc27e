#include "qmimo/rng.hpp"

#include <cmath>
#include <numbers>

namespace qmimo {
namespace {

// splitmix64 finalizer: bijective avalanche mix.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

double RandomSource::uniform() {
  // 53-bit mantissa, shifted into (0, 1] so log() is always finite.
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::gaussian() {
  const double u = uniform();
  const double v = uniform();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

std::complex<double> RandomSource::complex_gaussian() {
  const double u = uniform();
  const double v = uniform();
  const double r = std::sqrt(-std::log(u));
  return std::polar(r, 2.0 * std::numbers::pi * v);
}

RandomSource substream(std::uint64_t master_seed, std::uint64_t trial_id, std::uint64_t stream_tag) {
  std::uint64_t h = mix64(master_seed + 0x9E3779B97F4A7C15ULL);
  h = mix64(h ^ (trial_id + 0x9E3779B97F4A7C15ULL));
  h = mix64(h ^ (stream_tag + 0x9E3779B97F4A7C15ULL));
  return RandomSource(h);
}

}  // namespace qmimo
