#include <doctest.h>

#include <cmath>
#include <complex>

#include "qmimo/compensation.hpp"
#include "qmimo/rate.hpp"

using namespace qmimo;

namespace {

SystemConfig<double> mid_config() {
  SystemConfig<double> cfg;
  cfg.num_antennas = 16;
  cfg.num_users = 4;
  cfg.pilot_length = 4;
  cfg.adc_bits = 2;
  cfg.rf_scale_magnitude = 0.9;
  cfg.rf_phase = 0.3;
  cfg.rf_noise_var = 0.1;
  cfg.pilot_power = 10.0;
  cfg.data_power = 10.0;
  cfg.large_scale = VectorR<double>(4);
  cfg.large_scale << 1.6, 1.1, 0.7, 0.2;
  return cfg;
}

}  // namespace

TEST_SUITE("rate") {
  TEST_CASE("combiner output is the adjoint product") {
    MatrixC<double> p_hat(2, 2);
    p_hat << Complex<double>(1, 1), Complex<double>(0, 2),
             Complex<double>(2, 0), Complex<double>(1, -1);
    VectorC<double> y(2);
    y << Complex<double>(3, -1), Complex<double>(0, 4);
    const VectorC<double> r = mrc_combine(p_hat, y);
    // conj(1+i)*(3-i) + conj(2)*(4i) = (2-4i) + 8i = 2+4i
    CHECK(r[0].real() == doctest::Approx(2.0));
    CHECK(r[0].imag() == doctest::Approx(4.0));
    const VectorC<double> bad = VectorC<double>::Ones(3);
    CHECK_THROWS_AS(mrc_combine(p_hat, bad), std::invalid_argument);
  }

  TEST_CASE("interference power matches an explicit reassembly") {
    const ValidatedConfig<double> cfg(mid_config());
    TrialStreams streams = trial_streams(41, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> p_hat = lmmse_fast(block, cfg);

    const double eta = cfg.eta();
    const double rho = cfg.data_power();
    for (Index n = 0; n < cfg.users(); ++n) {
      double want = 0;
      for (Index m = 0; m < cfg.antennas(); ++m) {
        double row_power = 0;
        for (Index k = 0; k < cfg.users(); ++k) row_power += std::norm(ch.effective(m, k));
        const double nq = eta * (1 - eta) * (rho * row_power + 1 + cfg.rf_noise_var());
        want += (eta * eta * (cfg.rf_noise_var() + 1) + nq) * std::norm(p_hat(m, n));
      }
      for (Index k = 0; k < cfg.users(); ++k) {
        if (k == n) continue;
        Complex<double> dot = 0;
        for (Index m = 0; m < cfg.antennas(); ++m)
          dot += std::conj(p_hat(m, n)) * ch.effective(m, k);
        want += eta * eta * rho * std::norm(dot);
      }
      CHECK(noise_plus_interference(p_hat, ch.effective, cfg, n) ==
            doctest::Approx(want).epsilon(1e-12));
    }
  }

  TEST_CASE("conditional SINR decomposes into signal over residual") {
    const ValidatedConfig<double> cfg(mid_config());
    TrialStreams streams = trial_streams(42, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> p_hat = lmmse_fast(block, cfg);
    for (Index n = 0; n < cfg.users(); ++n) {
      const double sinr = instantaneous_sinr(p_hat, ch.effective, cfg, n);
      CHECK(sinr > 0.0);
      const double signal = cfg.data_power() * cfg.eta() * cfg.eta() *
                            std::norm(Complex<double>(p_hat.col(n).dot(ch.effective.col(n))));
      CHECK(sinr * noise_plus_interference(p_hat, ch.effective, cfg, n) ==
            doctest::Approx(signal).epsilon(1e-12));
    }
  }

  TEST_CASE("a silent estimate has zero SINR") {
    const ValidatedConfig<double> cfg(mid_config());
    const MatrixC<double> p = MatrixC<double>::Constant(16, 4, Complex<double>(0.5, 0));
    const MatrixC<double> p_hat = MatrixC<double>::Zero(16, 4);
    CHECK(instantaneous_sinr(p_hat, p, cfg, 2) == 0.0);
  }

  TEST_CASE("single-user unit system hits log2(3) under perfect accuracy") {
    SystemConfig<double> sys;
    sys.num_antennas = 1;
    sys.num_users = 1;
    sys.pilot_length = 1;
    sys.adc_bits = kInfiniteBits;
    sys.rf_scale_magnitude = 1.0;
    sys.rf_phase = 0.0;
    sys.rf_noise_var = 0.0;
    sys.data_power = 1.0;
    sys.large_scale = VectorR<double>::Ones(1);
    const ValidatedConfig<double> cfg(sys);
    const VectorR<double> ones = VectorR<double>::Ones(1);
    CHECK(rate_approx_with_accuracy(cfg, ones)[0] ==
          doctest::Approx(1.584962500721156).epsilon(1e-14));
  }

  TEST_CASE("the two closed-form groupings agree") {
    const ValidatedConfig<double> cfg(mid_config());
    const VectorR<double> a = rate_approx(cfg);
    const VectorR<double> b = rate_simplified(cfg);
    CHECK((a - b).norm() < 1e-13 * a.norm());
  }

  TEST_CASE("forcing unit accuracy reproduces the perfect-CSI bound") {
    const ValidatedConfig<double> cfg(mid_config());
    const VectorR<double> ones = VectorR<double>::Ones(cfg.users());
    const VectorR<double> forced = rate_approx_with_accuracy(cfg, ones);
    const VectorR<double> bound = rate_perfect_csi_bound(cfg);
    CHECK((forced - bound).norm() < 1e-13 * bound.norm());
    // The bound dominates the estimated-CSI rate.
    const VectorR<double> natural = rate_approx(cfg);
    for (Index n = 0; n < cfg.users(); ++n) CHECK(natural[n] <= bound[n]);
  }

  TEST_CASE("perfect-CSI bound saturates in the data power") {
    SystemConfig<double> sys = mid_config();
    sys.data_power = 1e6;
    const VectorR<double> at_1e6 = rate_perfect_csi_bound(ValidatedConfig<double>(sys));
    sys.data_power = 1e8;
    const VectorR<double> at_1e8 = rate_perfect_csi_bound(ValidatedConfig<double>(sys));
    const ValidatedConfig<double> cfg(sys);
    for (Index n = 0; n < cfg.users(); ++n) {
      CHECK(std::abs(at_1e6[n] - at_1e8[n]) < 1e-4);
      const double beta = cfg.large_scale()[n];
      const double limit = std::log2(
          1.0 + (beta + cfg.antennas() * beta) /
                    (cfg.beta_sum() / cfg.eta() + (1.0 / cfg.eta() - 2.0) * beta));
      CHECK(at_1e8[n] == doctest::Approx(limit).epsilon(1e-4));
    }
  }

  TEST_CASE("zero data power silences every closed form") {
    SystemConfig<double> sys = mid_config();
    sys.data_power = 0.0;
    const ValidatedConfig<double> cfg(sys);
    CHECK(rate_approx(cfg).norm() == 0.0);
    CHECK(rate_perfect_csi_bound(cfg).norm() == 0.0);
    CHECK(rate_simplified(cfg).norm() == 0.0);
  }

  TEST_CASE("rate grows with antennas and with resolution") {
    SystemConfig<double> sys = mid_config();
    double prev = 0;
    for (const int m : {8, 16, 32, 64}) {
      sys.num_antennas = m;
      const double sum = rate_approx(ValidatedConfig<double>(sys)).sum();
      CHECK(sum > prev);
      prev = sum;
    }
    sys = mid_config();
    prev = 0;
    for (const AdcBits b : {AdcBits(1), AdcBits(2), AdcBits(4), kInfiniteBits}) {
      sys.adc_bits = b;
      const double sum = rate_approx(ValidatedConfig<double>(sys)).sum();
      CHECK(sum > prev);
      prev = sum;
    }
  }

  TEST_CASE("symbol-level residuals validate the conditional closed form") {
    SystemConfig<double> sys = mid_config();
    sys.num_antennas = 8;
    sys.num_users = 2;
    sys.pilot_length = 2;
    sys.large_scale = VectorR<double>(2);
    sys.large_scale << 1.2, 0.6;
    const ValidatedConfig<double> cfg(sys);
    TrialStreams streams = trial_streams(43, 0);
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> p_hat = lmmse_fast(block, cfg);
    RandomSource rng = substream(43, 0, Stream::kDataSymbols);
    const auto oracle = symbol_level_sinr_oracle(ch, p_hat, cfg, 20000, rng);
    for (Index n = 0; n < cfg.users(); ++n) {
      const double npi = noise_plus_interference(p_hat, ch.effective, cfg, n);
      CHECK(oracle.residual_variance[n] == doctest::Approx(npi).epsilon(0.1));
    }
    CHECK_THROWS_AS(symbol_level_sinr_oracle(ch, p_hat, cfg, 50, rng), std::invalid_argument);
  }

  TEST_CASE("moment closed forms carry the accuracy and gain factors") {
    const ValidatedConfig<double> cfg(mid_config());
    const VectorR<double> alpha = estimation_accuracy(cfg);
    const double m = cfg.antennas();
    const double chi4 = cfg.chi_mag_sq() * cfg.chi_mag_sq();
    for (Index n = 0; n < cfg.users(); ++n) {
      const double beta = cfg.large_scale()[n];
      const double desired = expected_desired_power(cfg, n);
      CHECK(desired == doctest::Approx(m * m * alpha[n] * alpha[n] * beta * beta * chi4 +
                                       m * alpha[n] * beta * beta * chi4)
                           .epsilon(1e-12));
      CHECK(expected_crosstalk_power(cfg, n) ==
            doctest::Approx(m * alpha[n] * beta * chi4 * (cfg.beta_sum() - beta)).epsilon(1e-12));
    }
  }

  TEST_CASE("Monte Carlo rate tracks the closed-form approximation") {
    const ValidatedConfig<double> cfg(mid_config());
    const auto report = ergodic_rate_mc(cfg, 800, 44);
    CHECK(report.sum_mc == doctest::Approx(report.sum_approx).epsilon(0.05));
    CHECK(report.per_user_mc.sum() == doctest::Approx(report.sum_mc).epsilon(1e-12));
    CHECK(report.sum_ci95 > 0.0);
    CHECK(report.trials == 800);
  }

  TEST_CASE("Monte Carlo rate is thread-count invariant") {
    const ValidatedConfig<double> cfg(mid_config());
    const auto one = ergodic_rate_mc(cfg, 300, 45, 1);
    const auto eight = ergodic_rate_mc(cfg, 300, 45, 8);
    CHECK(one.sum_mc == eight.sum_mc);
    CHECK(one.sum_ci95 == eight.sum_ci95);
    CHECK((one.per_user_mc - eight.per_user_mc).norm() == 0.0);
  }

  TEST_CASE("confidence interval shrinks with more trials") {
    const ValidatedConfig<double> cfg(mid_config());
    const auto few = ergodic_rate_mc(cfg, 200, 46);
    const auto many = ergodic_rate_mc(cfg, 1600, 46);
    CHECK(many.sum_ci95 < few.sum_ci95);
    CHECK_THROWS_AS(ergodic_rate_mc(cfg, 1, 46), std::invalid_argument);
  }

  TEST_CASE("matching a front end against itself returns its own scale") {
    const SystemConfig<double> base = mid_config();
    const auto match = find_matching_scale(base, AdcBits(3), 0.77, AdcBits(3));
    CHECK(match.matched);
    CHECK(match.scale == doctest::Approx(0.77).epsilon(1e-9));
  }

  TEST_CASE("a finer converter can absorb a worse front-end scale") {
    SystemConfig<double> base = mid_config();
    base.num_antennas = 64;
    const auto match = find_matching_scale(base, AdcBits(1), 0.95, AdcBits(3));
    REQUIRE(match.matched);
    CHECK(match.scale < 0.95);
    // The matched pair tracks the reference curve away from the match point.
    for (const int m : {32, 128}) {
      SystemConfig<double> at_m = base;
      at_m.num_antennas = m;
      const double ref = sum_rate_at(at_m, AdcBits(1), 0.95);
      const double alt = sum_rate_at(at_m, AdcBits(3), match.scale);
      CHECK(std::abs(alt - ref) / ref < 0.005);
    }
  }

  TEST_CASE("a coarser converter cannot reach a clean reference") {
    SystemConfig<double> base = mid_config();
    base.num_antennas = 64;
    const auto match = find_matching_scale(base, AdcBits(5), 0.95, AdcBits(1));
    CHECK_FALSE(match.matched);
    CHECK(match.scale == 1.0);
    CHECK(match.achieved_sum_rate < match.target_sum_rate);
  }
}
