#include "qmimo/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

#include <unsupported/Eigen/KroneckerProduct>

#include "qmimo/channel.hpp"
#include "qmimo/estimation.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/rng.hpp"

namespace qmimo {

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

int uniform_int(RandomSource& rng, int lo, int hi) {
  const int span = hi - lo + 1;
  return lo + std::min(static_cast<int>(rng.uniform() * span), span - 1);
}

double uniform_db_power(RandomSource& rng, double lo_db, double hi_db) {
  return std::pow(10.0, (lo_db + (hi_db - lo_db) * rng.uniform()) / 10.0);
}

// Small random but valid system, exercising finite and ideal converters,
// partial RF impairments and uneven gains.
SystemConfig<double> random_system(RandomSource& rng, bool allow_zero_pilot_power) {
  SystemConfig<double> cfg;
  cfg.num_users = uniform_int(rng, 1, 4);
  cfg.pilot_length = uniform_int(rng, cfg.num_users, 8);
  cfg.num_antennas = uniform_int(rng, 2, 8);
  cfg.adc_bits = rng.uniform() < 0.15 ? kInfiniteBits : AdcBits(uniform_int(rng, 1, 7));
  cfg.rf_scale_magnitude = 0.5 + 0.5 * rng.uniform();
  cfg.rf_phase = (2.0 * rng.uniform() - 1.0) * std::numbers::pi;
  cfg.rf_noise_var = 0.5 * rng.uniform();
  cfg.pilot_power = allow_zero_pilot_power && rng.uniform() < 0.1
                        ? 0.0
                        : uniform_db_power(rng, -10.0, 30.0);
  cfg.data_power = uniform_db_power(rng, -10.0, 30.0);
  cfg.large_scale = VectorR<double>(cfg.num_users);
  for (int k = 0; k < cfg.num_users; ++k) cfg.large_scale[k] = 0.1 + 1.9 * rng.uniform();
  return cfg;
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-15});
  return std::abs(a - b) / scale;
}

std::uint64_t check_seed(std::uint64_t seed, std::uint64_t index) {
  return substream(seed, index, 0xCAFE).next();
}

}  // namespace

CheckResult check_dense_fast_equivalence(std::uint64_t seed, int instances, double fault_scale) {
  double worst = 0;
  for (int i = 0; i < instances; ++i) {
    RandomSource cfg_rng = substream(seed, static_cast<std::uint64_t>(i), 101);
    const ValidatedConfig<double> cfg(random_system(cfg_rng, /*allow_zero_pilot_power=*/true));
    TrialStreams streams = trial_streams(seed, static_cast<std::uint64_t>(i));
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> dense = lmmse_dense(block, cfg);
    MatrixC<double> fast = lmmse_fast(block, cfg);
    fast *= (1.0 + fault_scale);
    const double rel = (fast - dense).norm() / std::max(dense.norm(), 1e-300);
    worst = std::max(worst, rel);
  }
  return {"estimator/dense-fast-agreement", worst, 1e-10, worst <= 1e-10,
          "max relative Frobenius gap over " + std::to_string(instances) + " random instances"};
}

CheckResult check_rate_rearrangement(std::uint64_t seed, int instances) {
  double worst = 0;
  for (int i = 0; i < instances; ++i) {
    RandomSource rng = substream(seed, static_cast<std::uint64_t>(i), 102);
    const ValidatedConfig<double> cfg(random_system(rng, /*allow_zero_pilot_power=*/false));
    const VectorR<double> a = rate_approx(cfg);
    const VectorR<double> b = rate_simplified(cfg);
    for (Index n = 0; n < a.size(); ++n) worst = std::max(worst, rel_diff(a[n], b[n]));
  }
  return {"rate/rearrangement-identity", worst, 1e-12, worst <= 1e-12,
          "two groupings of the closed-form rate over " + std::to_string(instances) + " configs"};
}

CheckResult check_perfect_csi_limit(std::uint64_t seed, int instances) {
  double worst = 0;
  for (int i = 0; i < instances; ++i) {
    RandomSource rng = substream(seed, static_cast<std::uint64_t>(i), 103);
    const ValidatedConfig<double> cfg(random_system(rng, /*allow_zero_pilot_power=*/false));
    const VectorR<double> ones = VectorR<double>::Ones(cfg.users());
    const VectorR<double> forced = rate_approx_with_accuracy(cfg, ones);
    const VectorR<double> bound = rate_perfect_csi_bound(cfg);
    for (Index n = 0; n < forced.size(); ++n) worst = std::max(worst, rel_diff(forced[n], bound[n]));
  }
  return {"rate/perfect-csi-limit", worst, 1e-12, worst <= 1e-12,
          "closed-form rate with unit accuracy vs the perfect-CSI bound"};
}

CheckResult check_observation_covariance(std::uint64_t seed, int blocks) {
  SystemConfig<double> sys;
  sys.num_antennas = 4;
  sys.num_users = 2;
  sys.pilot_length = 4;
  sys.adc_bits = 2;
  sys.rf_scale_magnitude = 0.9;
  sys.rf_phase = 0.3;
  sys.rf_noise_var = 0.2;
  sys.pilot_power = 5.0;
  sys.large_scale = VectorR<double>(2);
  sys.large_scale << 1.5, 0.7;
  const ValidatedConfig<double> cfg(sys);
  const Index dim = sys.num_antennas * sys.pilot_length;

  MatrixC<double> emp = MatrixC<double>::Zero(dim, dim);
  for (int t = 0; t < blocks; ++t) {
    TrialStreams streams = trial_streams(seed, static_cast<std::uint64_t>(t));
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const Eigen::Map<const VectorC<double>> z(block.observations.data(), dim);
    emp.noalias() += z * z.adjoint();
  }
  emp /= blocks;

  // Assemble the model covariance directly from its definition.
  VectorR<double> c_p(sys.num_antennas * sys.num_users);
  for (int k = 0; k < sys.num_users; ++k)
    c_p.segment(k * sys.num_antennas, sys.num_antennas)
        .setConstant(cfg.chi_mag_sq() * sys.large_scale[k]);
  const MatrixC<double> phi_bar = Eigen::kroneckerProduct(
      dft_pilots<double>(sys.pilot_length, sys.num_users),
      MatrixC<double>::Identity(sys.num_antennas, sys.num_antennas));
  MatrixC<double> model = cfg.eta() * cfg.eta() * sys.pilot_power *
                          (phi_bar * c_p.cast<Complex<double>>().asDiagonal() * phi_bar.adjoint());
  model.diagonal().array() +=
      cfg.eta() * ((1.0 - cfg.eta()) * sys.pilot_power * cfg.chi_mag_sq() * cfg.beta_sum() +
                   sys.rf_noise_var + 1.0);

  const double measured = (emp - model).norm() / model.norm();
  return {"training/observation-covariance", measured, 0.05, measured <= 0.05,
          "sample covariance of the vectorized pilot observation, " + std::to_string(blocks) +
              " blocks"};
}

CheckResult check_quantizer_covariance(std::uint64_t seed, int draws) {
  SystemConfig<double> sys;
  sys.num_antennas = 4;
  sys.num_users = 3;
  sys.pilot_length = 3;
  sys.adc_bits = 3;
  sys.rf_scale_magnitude = 0.85;
  sys.rf_phase = -1.1;
  sys.rf_noise_var = 0.3;
  sys.data_power = 6.0;
  sys.large_scale = VectorR<double>(3);
  sys.large_scale << 1.0, 0.6, 1.4;
  const ValidatedConfig<double> cfg(sys);

  TrialStreams streams = trial_streams(seed, 0);
  const auto ch = draw_channel(cfg, streams.channel);
  const VectorC<double> x = complex_gaussian_vector<double>(sys.num_users, streams.data_symbols);
  const VectorC<double> mean = cfg.eta() * std::sqrt(sys.data_power) * (ch.effective * x);
  const VectorR<double> nq = aqnm_noise_cov(ch.raw, sys.data_power, cfg);

  MatrixC<double> emp = MatrixC<double>::Zero(sys.num_antennas, sys.num_antennas);
  for (int t = 0; t < draws; ++t) {
    const VectorC<double> y_rf = rf_frontend_output(ch.effective, x, sys.data_power,
                                                    sys.rf_noise_var, streams.rf_noise,
                                                    streams.thermal_noise);
    const VectorC<double> e = quantize_aqnm(y_rf, nq, cfg, streams.quant_noise) - mean;
    emp.noalias() += e * e.adjoint();
  }
  emp /= draws;

  MatrixC<double> model = MatrixC<double>::Zero(sys.num_antennas, sys.num_antennas);
  model.diagonal() =
      (cfg.eta() * cfg.eta() * (1.0 + sys.rf_noise_var) + nq.array()).matrix().cast<Complex<double>>();

  const double measured = (emp - model).norm() / model.norm();
  return {"frontend/quantizer-covariance", measured, 0.03, measured <= 0.03,
          "conditional output covariance of the quantized front end, " + std::to_string(draws) +
              " draws"};
}

CheckResult check_estimator_moments(std::uint64_t seed, int trials) {
  SystemConfig<double> sys;
  sys.num_antennas = 16;
  sys.num_users = 4;
  sys.pilot_length = 4;
  sys.adc_bits = 2;
  sys.rf_scale_magnitude = 0.9;
  sys.rf_phase = -0.7;
  sys.rf_noise_var = 0.1;
  sys.pilot_power = 10.0;
  sys.large_scale = VectorR<double>(4);
  sys.large_scale << 1.8, 1.2, 0.8, 0.4;
  const ValidatedConfig<double> cfg(sys);

  double desired = 0;
  double crosstalk = 0;
  for (int t = 0; t < trials; ++t) {
    TrialStreams streams = trial_streams(seed, static_cast<std::uint64_t>(t));
    const auto ch = draw_channel(cfg, streams.channel);
    const auto block = collect_pilot_block(ch, cfg, streams);
    const MatrixC<double> p_hat = lmmse_fast(block, cfg);
    desired += std::norm(Complex<double>(p_hat.col(0).dot(ch.effective.col(0))));
    for (int k = 1; k < sys.num_users; ++k)
      crosstalk += std::norm(Complex<double>(p_hat.col(0).dot(ch.effective.col(k))));
  }
  desired /= trials;
  crosstalk /= trials;

  const double measured = std::max(rel_diff(desired, expected_desired_power(cfg, 0)),
                                   rel_diff(crosstalk, expected_crosstalk_power(cfg, 0)));
  return {"estimator/second-moments", measured, 0.05, measured <= 0.05,
          "combiner second moments vs closed forms, " + std::to_string(trials) + " trials"};
}

CheckResult check_combiner_residual(std::uint64_t seed, int draws) {
  SystemConfig<double> sys;
  sys.num_antennas = 16;
  sys.num_users = 4;
  sys.pilot_length = 4;
  sys.adc_bits = 2;
  sys.rf_scale_magnitude = 0.9;
  sys.rf_phase = 0.4;
  sys.rf_noise_var = 0.1;
  sys.pilot_power = 10.0;
  sys.data_power = 8.0;
  sys.large_scale = VectorR<double>(4);
  sys.large_scale << 1.5, 1.0, 0.7, 0.3;
  const ValidatedConfig<double> cfg(sys);

  TrialStreams streams = trial_streams(seed, 0);
  const auto ch = draw_channel(cfg, streams.channel);
  const auto block = collect_pilot_block(ch, cfg, streams);
  const MatrixC<double> p_hat = lmmse_fast(block, cfg);

  RandomSource symbol_rng = substream(seed, 0, Stream::kDataSymbols);
  const auto oracle = symbol_level_sinr_oracle(ch, p_hat, cfg, draws, symbol_rng);

  double measured = 0;
  for (int n = 0; n < sys.num_users; ++n) {
    const double npi = noise_plus_interference(p_hat, ch.effective, cfg, n);
    const double sig = sys.data_power * cfg.eta() * cfg.eta() *
                       std::norm(Complex<double>(p_hat.col(n).dot(ch.effective.col(n))));
    measured = std::max(measured, rel_diff(oracle.residual_variance[n], npi));
    measured = std::max(measured, rel_diff(oracle.signal_power[n], sig));
  }
  return {"combiner/residual-variance", measured, 0.05, measured <= 0.05,
          "symbol-level residual and signal power vs conditional closed forms, " +
              std::to_string(draws) + " draws"};
}

ValidationReport run_validation(std::uint64_t seed) {
  ValidationReport report;
  report.seed = seed;
  report.checks.push_back(check_dense_fast_equivalence(check_seed(seed, 0)));
  report.checks.push_back(check_rate_rearrangement(check_seed(seed, 1)));
  report.checks.push_back(check_perfect_csi_limit(check_seed(seed, 2)));
  report.checks.push_back(check_observation_covariance(check_seed(seed, 3)));
  report.checks.push_back(check_quantizer_covariance(check_seed(seed, 4)));
  report.checks.push_back(check_estimator_moments(check_seed(seed, 5)));
  report.checks.push_back(check_combiner_residual(check_seed(seed, 6)));
  return report;
}

std::string report_to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["all_pass"] = report.all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks)
    j["checks"].push_back({{"name", c.name},
                           {"measured", c.measured},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  return j.dump(2) + "\n";
}

}  // namespace qmimo
