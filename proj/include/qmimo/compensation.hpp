#pragma once

#include <cmath>
#include <stdexcept>

#include "qmimo/config.hpp"
#include "qmimo/rate.hpp"

namespace qmimo {

template <typename Scalar = double>
struct CompensationMatch {
  AdcBits bits;              // resolution of the alternative front end
  Scalar scale;              // rf_scale_magnitude that matches the reference
  Scalar achieved_sum_rate;  // sum rate at (bits, scale)
  Scalar target_sum_rate;    // sum rate of the reference front end
  bool matched;              // false when no scale in (0, 1] reaches the target
};

template <typename Scalar>
Scalar sum_rate_at(SystemConfig<Scalar> base, AdcBits bits, Scalar scale) {
  base.adc_bits = bits;
  base.rf_scale_magnitude = scale;
  return rate_approx(ValidatedConfig<Scalar>(base)).sum();
}

// Find the front-end scale at which an ADC of alt_bits delivers the same
// closed-form sum rate as the reference pair (ref_bits, ref_scale), all other
// parameters taken from base (including the antenna count at which the match
// is struck). The sum rate is strictly increasing in the scale, so a bisection
// over (0, 1] either converges or proves the target unreachable; in the latter
// case the match reports the best achievable value at scale 1.
template <typename Scalar>
CompensationMatch<Scalar> find_matching_scale(const SystemConfig<Scalar>& base, AdcBits ref_bits,
                                              Scalar ref_scale, AdcBits alt_bits) {
  const Scalar target = sum_rate_at(base, ref_bits, ref_scale);
  const Scalar at_full = sum_rate_at(base, alt_bits, Scalar(1));
  if (at_full < target)
    return {alt_bits, Scalar(1), at_full, target, false};

  Scalar lo = Scalar(0);  // exclusive; rate -> 0 as scale -> 0 when target > 0
  Scalar hi = Scalar(1);
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = (lo + hi) / Scalar(2);
    if (mid <= Scalar(0) || mid == lo || mid == hi) break;
    if (sum_rate_at(base, alt_bits, mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const Scalar achieved = sum_rate_at(base, alt_bits, hi);
  const bool ok = target == Scalar(0) ||
                  std::abs(achieved - target) <= Scalar(1e-9) * std::max(Scalar(1), target);
  return {alt_bits, hi, achieved, target, ok};
}

}  // namespace qmimo
