#pragma once

#include <cmath>
#include <stdexcept>

#include "qmimo/config.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

// Large-scale gain at distance r with shadowing factor z (linear).
// Normalization: a user at the hole radius with z = 1 has unit gain.
template <typename Scalar>
Scalar path_gain(Scalar r, Scalar z, const ScenarioSpec<Scalar>& spec) {
  if (!(r >= spec.hole_radius))
    throw std::invalid_argument("path_gain: distance below hole_radius");
  return z * std::pow(r / spec.hole_radius, -spec.path_loss_exp);
}

// Draw one cell of users. Per user, in order: one uniform for the radial
// position (uniform by area over the annulus), one gaussian for shadowing.
template <typename Scalar = double>
VectorR<Scalar> drop_users(const ScenarioSpec<Scalar>& spec, RandomSource& rng) {
  validate_scenario(spec);
  const Scalar rh2 = spec.hole_radius * spec.hole_radius;
  const Scalar R2 = spec.cell_radius * spec.cell_radius;
  VectorR<Scalar> beta(spec.num_users);
  for (int k = 0; k < spec.num_users; ++k) {
    const Scalar u = static_cast<Scalar>(rng.uniform());
    const Scalar r = std::sqrt(rh2 + u * (R2 - rh2));
    const Scalar shadow_db = spec.shadow_std_db * static_cast<Scalar>(rng.gaussian());
    const Scalar z = std::pow(Scalar(10), shadow_db / Scalar(10));
    beta[k] = path_gain(r, z, spec);
  }
  return beta;
}

}  // namespace qmimo
