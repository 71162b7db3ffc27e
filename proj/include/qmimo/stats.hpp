#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qmimo {

template <typename Scalar = double>
struct MeanCi {
  Scalar mean;
  Scalar stddev;  // sample standard deviation
  Scalar ci95;    // half-width of the normal-approximation 95% interval
  std::size_t count;
};

// 97.5% standard-normal quantile.
inline constexpr double kZ975 = 1.959963984540054;

template <typename Scalar>
MeanCi<Scalar> mean_ci(const std::vector<Scalar>& samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("mean_ci: need at least two samples");
  Scalar sum = 0;
  for (const Scalar s : samples) sum += s;
  const Scalar mean = sum / static_cast<Scalar>(n);
  Scalar ss = 0;
  for (const Scalar s : samples) ss += (s - mean) * (s - mean);
  const Scalar sd = std::sqrt(ss / static_cast<Scalar>(n - 1));
  const Scalar ci = static_cast<Scalar>(kZ975) * sd / std::sqrt(static_cast<Scalar>(n));
  return {mean, sd, ci, n};
}

}  // namespace qmimo
