#include <doctest.h>

#include <cmath>
#include <complex>

#include "qmimo/estimation.hpp"

using namespace qmimo;

namespace {

SystemConfig<double> small_config() {
  SystemConfig<double> cfg;
  cfg.num_antennas = 6;
  cfg.num_users = 3;
  cfg.pilot_length = 4;
  cfg.adc_bits = 2;
  cfg.rf_scale_magnitude = 0.9;
  cfg.rf_phase = -0.4;
  cfg.rf_noise_var = 0.15;
  cfg.pilot_power = 8.0;
  cfg.data_power = 8.0;
  cfg.large_scale = VectorR<double>(3);
  cfg.large_scale << 1.4, 0.9, 0.3;
  return cfg;
}

}  // namespace

TEST_SUITE("estimation") {
  TEST_CASE("training matrix columns are orthogonal with norm tau") {
    for (const auto [tau, users] : {std::pair{8, 8}, std::pair{4, 2}, std::pair{7, 3}}) {
      const MatrixC<double> phi = dft_pilots<double>(tau, users);
      CHECK(phi.rows() == tau);
      CHECK(phi.cols() == users);
      const MatrixC<double> gram = phi.adjoint() * phi;
      CHECK((gram - double(tau) * MatrixC<double>::Identity(users, users)).norm() < 1e-12 * tau);
      // First user transmits the all-ones sequence.
      CHECK((phi.col(0) - VectorC<double>::Ones(tau)).norm() < 1e-14);
    }
    CHECK_THROWS_AS(dft_pilots<double>(2, 3), std::invalid_argument);
  }

  TEST_CASE("training entries stay on the unit circle for long sequences") {
    const MatrixC<double> phi = dft_pilots<double>(64, 64);
    for (Index j : {Index(1), Index(31), Index(63)})
      CHECK(std::abs(phi(63, j)) == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("noiseless observations are the scaled channel-pilot product") {
    SystemConfig<double> sys = small_config();
    sys.adc_bits = kInfiniteBits;  // no quantization noise
    sys.rf_noise_var = 0.0;        // no front-end distortion
    const ValidatedConfig<double> cfg(sys);
    TrialStreams streams = trial_streams(21, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    FrontEndToggles quiet;
    quiet.thermal_noise = false;
    const auto block = collect_pilot_block(ch, cfg, streams, quiet);
    const MatrixC<double> expected =
        std::sqrt(cfg.pilot_power()) * (ch.effective * block.pilots.transpose());
    CHECK((block.observations - expected).norm() < 1e-12 * expected.norm());
  }

  TEST_CASE("noiseless estimate recovers each column up to its accuracy") {
    SystemConfig<double> sys = small_config();
    sys.adc_bits = kInfiniteBits;
    sys.rf_noise_var = 0.0;
    const ValidatedConfig<double> cfg(sys);
    TrialStreams streams = trial_streams(22, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    FrontEndToggles quiet;
    quiet.thermal_noise = false;
    const auto block = collect_pilot_block(ch, cfg, streams, quiet);
    const MatrixC<double> p_hat = lmmse_fast(block, cfg);
    const VectorR<double> alpha = estimation_accuracy(cfg);
    for (Index k = 0; k < 3; ++k)
      CHECK((p_hat.col(k) - alpha[k] * ch.effective.col(k)).norm() <
            1e-12 * ch.effective.col(k).norm());
  }

  TEST_CASE("accuracy and error match the scalar closed form") {
    SystemConfig<double> sys;
    sys.num_antennas = 2;
    sys.num_users = 1;
    sys.pilot_length = 1;
    sys.adc_bits = 1;
    sys.rf_scale_magnitude = 0.8;
    sys.rf_phase = 0.5;
    sys.rf_noise_var = 0.2;
    sys.pilot_power = 4.0;
    sys.large_scale = VectorR<double>::Constant(1, 1.5);
    const ValidatedConfig<double> cfg(sys);
    CHECK(estimation_accuracy(cfg)[0] == doctest::Approx(0.4850285714285714).epsilon(1e-14));
    CHECK(analytic_mse(cfg) == doctest::Approx(0.4943725714285716).epsilon(1e-14));
  }

  TEST_CASE("accuracy rises and error falls with pilot power") {
    SystemConfig<double> sys = small_config();
    double prev_alpha = -1, prev_mse = 1e9;
    for (const double rho : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
      sys.pilot_power = rho;
      const ValidatedConfig<double> cfg(sys);
      const double a = estimation_accuracy(cfg)[0];
      const double m = analytic_mse(cfg);
      CHECK(a > prev_alpha);
      CHECK(m < prev_mse);
      CHECK(a >= 0.0);
      CHECK(a < 1.0);
      prev_alpha = a;
      prev_mse = m;
    }
  }

  TEST_CASE("zero pilot power yields the prior") {
    SystemConfig<double> sys = small_config();
    sys.pilot_power = 0.0;
    const ValidatedConfig<double> cfg(sys);
    CHECK(estimation_accuracy(cfg).norm() == 0.0);
    // With no estimate, the error is the full effective-channel power.
    CHECK(analytic_mse(cfg) ==
          doctest::Approx(cfg.chi_mag_sq() * cfg.beta_sum() / cfg.users()).epsilon(1e-14));
    TrialStreams streams = trial_streams(23, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    CHECK(lmmse_fast(block, cfg).norm() == 0.0);
    CHECK(lmmse_dense(block, cfg).norm() == 0.0);
  }

  TEST_CASE("error floor needs a square training layout") {
    const SystemConfig<double> sys = small_config();  // tau=4, K=3
    CHECK_THROWS_AS(mse_floor(ValidatedConfig<double>(sys)), FloorUndefined);
  }

  TEST_CASE("equal-gain floor reduces to mu*beta*|chi|^2") {
    SystemConfig<double> sys;
    sys.num_antennas = 8;
    sys.num_users = 5;
    sys.pilot_length = 5;
    sys.adc_bits = 2;
    sys.rf_scale_magnitude = 0.9;
    sys.large_scale = VectorR<double>::Constant(5, 0.8);
    const ValidatedConfig<double> cfg(sys);
    CHECK(mse_floor(cfg) == doctest::Approx(0.07614).epsilon(1e-12));
  }

  TEST_CASE("analytic error approaches the floor at extreme pilot power") {
    SystemConfig<double> sys = small_config();
    sys.pilot_length = sys.num_users;
    sys.pilot_power = 1e6;
    const ValidatedConfig<double> cfg(sys);
    const double floor = mse_floor(cfg);
    CHECK(std::abs(analytic_mse(cfg) - floor) / floor < 1e-4);
  }

  TEST_CASE("fast and dense estimators agree on a noisy instance") {
    const ValidatedConfig<double> cfg(small_config());
    TrialStreams streams = trial_streams(24, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> fast = lmmse_fast(block, cfg);
    const MatrixC<double> dense = lmmse_dense(block, cfg);
    CHECK((fast - dense).norm() < 1e-12 * dense.norm());
  }

  TEST_CASE("dense estimator refuses oversized problems") {
    SystemConfig<double> sys = small_config();
    sys.num_antennas = 2048;
    sys.pilot_length = 4;
    const ValidatedConfig<double> cfg(sys);
    PilotBlock<double> block;
    block.pilots = dft_pilots<double>(4, 3);
    block.observations = MatrixC<double>::Zero(2048, 4);
    CHECK_THROWS_AS(lmmse_dense(block, cfg), std::invalid_argument);
  }

  TEST_CASE("estimators reject mismatched blocks") {
    const ValidatedConfig<double> cfg(small_config());
    PilotBlock<double> block;
    block.pilots = dft_pilots<double>(4, 3);
    block.observations = MatrixC<double>::Zero(5, 4);  // wrong antenna count
    CHECK_THROWS_AS(lmmse_fast(block, cfg), std::invalid_argument);
    CHECK_THROWS_AS(lmmse_dense(block, cfg), std::invalid_argument);
  }

  TEST_CASE("estimate bundle is self-consistent") {
    const ValidatedConfig<double> cfg(small_config());
    TrialStreams streams = trial_streams(25, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const auto est = estimate_channel(block, cfg);
    CHECK((est.p_hat - lmmse_fast(block, cfg)).norm() == 0.0);
    CHECK((est.alpha - estimation_accuracy(cfg)).norm() == 0.0);
    CHECK(est.mse == analytic_mse(cfg));
  }

  TEST_CASE("empirical error agrees with the analytic value") {
    const ValidatedConfig<double> cfg(small_config());
    const auto mc = empirical_mse(cfg, 2000, 31);
    const double want = analytic_mse(cfg);
    CHECK(std::abs(mc.mean - want) < std::max(3.0 * mc.ci95, 0.02 * want));
  }

  TEST_CASE("empirical error is thread-count invariant") {
    const ValidatedConfig<double> cfg(small_config());
    const auto one = empirical_mse(cfg, 400, 32, 1);
    const auto many = empirical_mse(cfg, 400, 32, 8);
    CHECK(one.mean == many.mean);
    CHECK(one.ci95 == many.ci95);
  }

  TEST_CASE("empirical error honors the trial-id base") {
    const ValidatedConfig<double> cfg(small_config());
    const ScenarioSpec<double>* no_scenario = nullptr;
    const auto a = empirical_mse(cfg, 200, 33, 1, no_scenario, 0);
    const auto b = empirical_mse(cfg, 200, 33, 1, no_scenario, 200);
    CHECK(a.mean != b.mean);
  }

  TEST_CASE("empirical error needs at least two trials") {
    const ValidatedConfig<double> cfg(small_config());
    CHECK_THROWS_AS(empirical_mse(cfg, 1, 34), std::invalid_argument);
  }
}
