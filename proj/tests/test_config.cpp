#include <doctest.h>

#include "qmimo/config.hpp"
#include "qmimo/quantization.hpp"

using namespace qmimo;

namespace {

SystemConfig<double> sample_config() {
  SystemConfig<double> cfg;
  cfg.num_antennas = 16;
  cfg.num_users = 4;
  cfg.pilot_length = 6;
  cfg.adc_bits = 3;
  cfg.rf_scale_magnitude = 0.9;
  cfg.rf_phase = 0.25;
  cfg.rf_noise_var = 0.1;
  cfg.pilot_power = 5.0;
  cfg.data_power = 8.0;
  cfg.large_scale = VectorR<double>::Constant(4, 1.5);
  return cfg;
}

ConfigViolation violation_of(const SystemConfig<double>& cfg) {
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    return e.violation();
  }
  FAIL("expected ConfigError");
  return ConfigViolation::kMalformedConfig;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("tabulated distortion factors are bit-exact") {
    CHECK(quantization_params<double>(1).mu == 0.3634);
    CHECK(quantization_params<double>(2).mu == 0.1175);
    CHECK(quantization_params<double>(3).mu == 0.03454);
    CHECK(quantization_params<double>(4).mu == 0.009497);
    CHECK(quantization_params<double>(5).mu == 0.002499);
    for (int b = 1; b <= 5; ++b) {
      const auto q = quantization_params<double>(b);
      CHECK(q.eta == 1.0 - q.mu);
    }
  }

  TEST_CASE("asymptotic distortion factors match frozen references") {
    CHECK(quantization_params<double>(6).mu ==
          doctest::Approx(0.0006642331656131168).epsilon(1e-15));
    CHECK(quantization_params<double>(7).mu ==
          doctest::Approx(0.0001660582914032792).epsilon(1e-15));
  }

  TEST_CASE("ideal converter has no distortion") {
    const auto q = quantization_params<double>(kInfiniteBits);
    CHECK(q.mu == 0.0);
    CHECK(q.eta == 1.0);
  }

  TEST_CASE("distortion decreases strictly with resolution, across the table seam") {
    double prev = quantization_params<double>(1).mu;
    for (int b = 2; b <= 12; ++b) {
      const double mu = quantization_params<double>(b).mu;
      CHECK(mu < prev);
      CHECK(mu > 0.0);
      prev = mu;
    }
  }

  TEST_CASE("non-positive resolutions are rejected") {
    CHECK_THROWS_AS(quantization_params<double>(0), std::invalid_argument);
    CHECK_THROWS_AS(quantization_params<double>(-3), std::invalid_argument);
  }

  TEST_CASE("validated config derives the front-end constants") {
    const ValidatedConfig<double> cfg(sample_config());
    CHECK(cfg.mu() == 0.03454);
    CHECK(cfg.eta() == 1.0 - 0.03454);
    CHECK(cfg.chi_mag_sq() == doctest::Approx(0.81).epsilon(1e-15));
    CHECK(cfg.chi().real() == doctest::Approx(0.9 * std::cos(0.25)).epsilon(1e-15));
    CHECK(cfg.chi().imag() == doctest::Approx(0.9 * std::sin(0.25)).epsilon(1e-15));
    CHECK(cfg.beta_sum() == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(cfg.antennas() == 16);
    CHECK(cfg.pilot_length() == 6);
  }

  TEST_CASE("each constraint violation is reported with its kind") {
    SystemConfig<double> cfg = sample_config();

    cfg.pilot_length = 3;  // fewer pilot symbols than users
    CHECK(violation_of(cfg) == ConfigViolation::kPilotTooShort);

    cfg = sample_config();
    cfg.rf_scale_magnitude = 1.2;
    CHECK(violation_of(cfg) == ConfigViolation::kRfScaleOutOfRange);
    cfg.rf_scale_magnitude = 0.0;
    CHECK(violation_of(cfg) == ConfigViolation::kRfScaleOutOfRange);
    cfg.rf_scale_magnitude = -0.5;
    CHECK(violation_of(cfg) == ConfigViolation::kRfScaleOutOfRange);

    cfg = sample_config();
    cfg.adc_bits = 0;
    CHECK(violation_of(cfg) == ConfigViolation::kInvalidAdcBits);

    cfg = sample_config();
    cfg.rf_noise_var = -0.1;
    CHECK(violation_of(cfg) == ConfigViolation::kNegativeNoiseVar);

    cfg = sample_config();
    cfg.pilot_power = -1.0;
    CHECK(violation_of(cfg) == ConfigViolation::kNegativePower);

    cfg = sample_config();
    cfg.large_scale = VectorR<double>::Ones(3);
    CHECK(violation_of(cfg) == ConfigViolation::kLargeScaleSizeMismatch);

    cfg = sample_config();
    cfg.large_scale[2] = -0.4;
    CHECK(violation_of(cfg) == ConfigViolation::kNegativeLargeScale);

    cfg = sample_config();
    cfg.num_antennas = 0;
    CHECK(violation_of(cfg) == ConfigViolation::kNonPositiveCount);
  }

  TEST_CASE("boundary values are accepted") {
    SystemConfig<double> cfg = sample_config();
    cfg.rf_scale_magnitude = 1.0;
    cfg.rf_noise_var = 0.0;
    cfg.pilot_power = 0.0;
    cfg.pilot_length = cfg.num_users;
    cfg.large_scale[0] = 0.0;
    CHECK_NOTHROW(validate_config(cfg));
  }

  TEST_CASE("scenario geometry is validated") {
    ScenarioSpec<double> spec;  // defaults form a valid cell
    CHECK_NOTHROW(validate_scenario(spec));
    spec.hole_radius = 900;
    CHECK_THROWS_AS(validate_scenario(spec), ConfigError);
    spec = ScenarioSpec<double>{};
    spec.path_loss_exp = 0;
    CHECK_THROWS_AS(validate_scenario(spec), ConfigError);
    spec = ScenarioSpec<double>{};
    spec.num_users = 0;
    CHECK_THROWS_AS(validate_scenario(spec), ConfigError);
  }

  TEST_CASE("single-precision instantiation stays consistent") {
    CHECK(quantization_params<float>(2).mu == doctest::Approx(0.1175f));
    SystemConfig<float> cfg;
    cfg.large_scale = VectorR<float>::Ones(cfg.num_users);
    const ValidatedConfig<float> vc(cfg);
    CHECK(vc.eta() == doctest::Approx(1.0f - 0.1175f));
  }
}
