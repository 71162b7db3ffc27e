#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qmimo/quantization.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

// Uplink system description. Powers and noise variances are linear (not dB);
// the large_scale vector holds one gain per user.
template <typename Scalar = double>
struct SystemConfig {
  int num_antennas = 64;
  int num_users = 10;
  int pilot_length = 10;
  AdcBits adc_bits = 2;
  Scalar rf_scale_magnitude = Scalar(1);  // |chi|, multiplicative front-end scale
  Scalar rf_phase = Scalar(0);            // arg(chi), radians
  Scalar rf_noise_var = Scalar(0);        // additive front-end distortion power per antenna
  Scalar pilot_power = Scalar(10);        // linear transmit power during training
  Scalar data_power = Scalar(10);         // linear transmit power during data
  VectorR<Scalar> large_scale;            // beta_k >= 0, length num_users
};

// Random user drop: distances uniform by area over an annulus around the
// receiver, log-normal shadowing, power-law path loss normalized to the
// inner radius.
template <typename Scalar = double>
struct ScenarioSpec {
  Scalar cell_radius = Scalar(900);
  Scalar hole_radius = Scalar(100);
  Scalar shadow_std_db = Scalar(8);
  Scalar path_loss_exp = Scalar(3.8);
  int num_users = 10;
};

enum class ConfigViolation {
  kNonPositiveCount,
  kPilotTooShort,
  kInvalidAdcBits,
  kRfScaleOutOfRange,
  kNegativeNoiseVar,
  kNegativePower,
  kLargeScaleSizeMismatch,
  kNegativeLargeScale,
  kBadScenarioGeometry,
  kMalformedConfig,
};

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(ConfigViolation violation, const std::string& message)
      : std::invalid_argument(message), violation_(violation) {}
  ConfigViolation violation() const { return violation_; }

 private:
  ConfigViolation violation_;
};

// A SystemConfig that passed validation, plus the derived quantities every
// formula needs. Construction throws ConfigError; instances are immutable.
template <typename Scalar = double>
class ValidatedConfig {
 public:
  explicit ValidatedConfig(SystemConfig<Scalar> cfg) : cfg_(std::move(cfg)) {
    check(cfg_);
    const auto q = quantization_params<Scalar>(cfg_.adc_bits);
    mu_ = q.mu;
    eta_ = q.eta;
    chi_ = std::polar(cfg_.rf_scale_magnitude, cfg_.rf_phase);
    chi_mag_sq_ = cfg_.rf_scale_magnitude * cfg_.rf_scale_magnitude;
    beta_sum_ = cfg_.large_scale.sum();
  }

  const SystemConfig<Scalar>& base() const { return cfg_; }

  int antennas() const { return cfg_.num_antennas; }
  int users() const { return cfg_.num_users; }
  int pilot_length() const { return cfg_.pilot_length; }
  AdcBits adc_bits() const { return cfg_.adc_bits; }
  Scalar pilot_power() const { return cfg_.pilot_power; }
  Scalar data_power() const { return cfg_.data_power; }
  Scalar rf_noise_var() const { return cfg_.rf_noise_var; }
  const VectorR<Scalar>& large_scale() const { return cfg_.large_scale; }

  Scalar mu() const { return mu_; }
  Scalar eta() const { return eta_; }
  Complex<Scalar> chi() const { return chi_; }
  Scalar chi_mag_sq() const { return chi_mag_sq_; }
  Scalar beta_sum() const { return beta_sum_; }

 private:
  static void check(const SystemConfig<Scalar>& c) {
    if (c.num_antennas < 1 || c.num_users < 1 || c.pilot_length < 1)
      throw ConfigError(ConfigViolation::kNonPositiveCount,
                        "num_antennas, num_users and pilot_length must be positive");
    if (c.pilot_length < c.num_users)
      throw ConfigError(ConfigViolation::kPilotTooShort,
                        "pilot_length must be at least num_users (orthogonal training)");
    if (c.adc_bits && *c.adc_bits < 1)
      throw ConfigError(ConfigViolation::kInvalidAdcBits, "adc_bits must be >= 1 when finite");
    if (!(c.rf_scale_magnitude > Scalar(0)) || c.rf_scale_magnitude > Scalar(1))
      throw ConfigError(ConfigViolation::kRfScaleOutOfRange,
                        "rf_scale_magnitude must lie in (0, 1]");
    if (c.rf_noise_var < Scalar(0))
      throw ConfigError(ConfigViolation::kNegativeNoiseVar, "rf_noise_var must be >= 0");
    if (c.pilot_power < Scalar(0) || c.data_power < Scalar(0))
      throw ConfigError(ConfigViolation::kNegativePower, "transmit powers must be >= 0");
    if (c.large_scale.size() != c.num_users)
      throw ConfigError(ConfigViolation::kLargeScaleSizeMismatch,
                        "large_scale must hold one gain per user");
    if ((c.large_scale.array() < Scalar(0)).any())
      throw ConfigError(ConfigViolation::kNegativeLargeScale, "large_scale gains must be >= 0");
  }

  SystemConfig<Scalar> cfg_;
  Scalar mu_, eta_, chi_mag_sq_, beta_sum_;
  Complex<Scalar> chi_;
};

template <typename Scalar>
ValidatedConfig<Scalar> validate_config(const SystemConfig<Scalar>& cfg) {
  return ValidatedConfig<Scalar>(cfg);
}

template <typename Scalar>
void validate_scenario(const ScenarioSpec<Scalar>& s) {
  if (s.num_users < 1)
    throw ConfigError(ConfigViolation::kNonPositiveCount, "scenario num_users must be positive");
  if (!(s.hole_radius > Scalar(0)) || !(s.cell_radius > s.hole_radius))
    throw ConfigError(ConfigViolation::kBadScenarioGeometry,
                      "require 0 < hole_radius < cell_radius");
  if (s.shadow_std_db < Scalar(0) || !(s.path_loss_exp > Scalar(0)))
    throw ConfigError(ConfigViolation::kBadScenarioGeometry,
                      "shadow_std_db must be >= 0 and path_loss_exp > 0");
}

}  // namespace qmimo
