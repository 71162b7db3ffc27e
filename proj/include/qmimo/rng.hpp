#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "qmimo/types.hpp"

namespace qmimo {

// Deterministic random stream. Draw methods consume a fixed number of engine
// words, so a given seed always yields the same sequence regardless of caller.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                         // (0, 1]
  double gaussian();                        // standard normal
  std::complex<double> complex_gaussian();  // circularly symmetric, E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
};

// Purpose tags for per-trial substreams. Distinct (trial_id, tag) pairs yield
// statistically independent streams, which keeps results reproducible no
// matter how trials are scheduled across threads.
enum class Stream : std::uint64_t {
  kChannel = 1,
  kRfNoise = 2,
  kThermalNoise = 3,
  kQuantNoise = 4,
  kUserDrop = 5,
  kDataSymbols = 6,
};

RandomSource substream(std::uint64_t master_seed, std::uint64_t trial_id, std::uint64_t stream_tag);

inline RandomSource substream(std::uint64_t master_seed, std::uint64_t trial_id, Stream tag) {
  return substream(master_seed, trial_id, static_cast<std::uint64_t>(tag));
}

// One substream per noise source of a simulated trial.
struct TrialStreams {
  RandomSource channel, rf_noise, thermal_noise, quant_noise, user_drop, data_symbols;
};

inline TrialStreams trial_streams(std::uint64_t master_seed, std::uint64_t trial_id) {
  return {substream(master_seed, trial_id, Stream::kChannel),
          substream(master_seed, trial_id, Stream::kRfNoise),
          substream(master_seed, trial_id, Stream::kThermalNoise),
          substream(master_seed, trial_id, Stream::kQuantNoise),
          substream(master_seed, trial_id, Stream::kUserDrop),
          substream(master_seed, trial_id, Stream::kDataSymbols)};
}

template <typename Scalar = double>
VectorC<Scalar> complex_gaussian_vector(Index n, RandomSource& rng) {
  VectorC<Scalar> v(n);
  for (Index i = 0; i < n; ++i) {
    const auto z = rng.complex_gaussian();
    v[i] = Complex<Scalar>(static_cast<Scalar>(z.real()), static_cast<Scalar>(z.imag()));
  }
  return v;
}

// Column-major fill order; part of the reproducibility contract.
template <typename Scalar = double>
MatrixC<Scalar> complex_gaussian_matrix(Index rows, Index cols, RandomSource& rng) {
  MatrixC<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const auto z = rng.complex_gaussian();
      m(i, j) = Complex<Scalar>(static_cast<Scalar>(z.real()), static_cast<Scalar>(z.imag()));
    }
  return m;
}

}  // namespace qmimo
