#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace qmimo {

// ADC resolution in bits per complex dimension. Disengaged means an ideal
// (unquantized) front end.
using AdcBits = std::optional<int>;
inline constexpr AdcBits kInfiniteBits = std::nullopt;

template <typename Scalar = double>
struct QuantizationParams {
  Scalar mu;   // distortion factor: quantization-noise power per unit input power
  Scalar eta;  // linear gain of the quantizer, 1 - mu
};

// Distortion factor of a b-bit scalar quantizer under the additive
// quantization noise model. Resolutions up to 5 bits use the tabulated
// optimal-quantizer values; beyond that the uniform-quantizer asymptote
// (pi * sqrt(3) / 2) * 2^(-2b) applies.
template <typename Scalar = double>
QuantizationParams<Scalar> quantization_params(AdcBits bits) {
  if (!bits) return {Scalar(0), Scalar(1)};
  const int b = *bits;
  if (b < 1) throw std::invalid_argument("quantization_params: adc_bits must be >= 1");
  constexpr double table[5] = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};
  const double mu = b <= 5 ? table[b - 1]
                           : std::ldexp(std::numbers::pi * std::numbers::sqrt3 / 2.0, -2 * b);
  return {static_cast<Scalar>(mu), static_cast<Scalar>(1.0 - mu)};
}

}  // namespace qmimo
