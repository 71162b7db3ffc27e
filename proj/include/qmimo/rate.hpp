#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qmimo/channel.hpp"
#include "qmimo/config.hpp"
#include "qmimo/estimation.hpp"
#include "qmimo/parallel.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/scenario.hpp"
#include "qmimo/stats.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

// Maximal-ratio combining: one soft symbol per user from the quantized
// observation.
template <typename DerivedP, typename DerivedY>
VectorC<RealOf<DerivedP>> mrc_combine(const Eigen::MatrixBase<DerivedP>& p_hat,
                                      const Eigen::MatrixBase<DerivedY>& y_q) {
  if (y_q.cols() != 1 || y_q.rows() != p_hat.rows())
    throw std::invalid_argument("mrc_combine: observation must have one entry per antenna");
  return p_hat.adjoint() * y_q;
}

// Conditional power of everything in the combiner output that is not the
// desired term, given the realization pair (p, p_hat): amplified thermal and
// front-end noise, quantization noise shaped by the combiner, and
// multi-user interference.
template <typename Scalar>
Scalar noise_plus_interference(const MatrixC<Scalar>& p_hat, const MatrixC<Scalar>& p,
                               const ValidatedConfig<Scalar>& cfg, Index user) {
  if (p_hat.rows() != p.rows() || p_hat.cols() != p.cols())
    throw std::invalid_argument("noise_plus_interference: estimate/channel shape mismatch");
  if (user < 0 || user >= p.cols()) throw std::invalid_argument("noise_plus_interference: bad user");
  const Scalar eta = cfg.eta();
  const Scalar rho = cfg.data_power();
  const auto pn_hat = p_hat.col(user);

  Scalar acc = eta * eta * (cfg.rf_noise_var() + Scalar(1)) * pn_hat.squaredNorm();
  // Quantization-noise covariance at data power, from |chi|^2*(G G^H)_mm =
  // (P P^H)_mm.
  const VectorR<Scalar> nq =
      (eta * (Scalar(1) - eta) *
       (rho * p.rowwise().squaredNorm().array() + Scalar(1) + cfg.rf_noise_var()))
          .matrix();
  acc += (pn_hat.array().abs2() * nq.array()).sum();
  for (Index k = 0; k < p.cols(); ++k) {
    if (k == user) continue;
    acc += eta * eta * rho * std::norm(Complex<Scalar>(pn_hat.dot(p.col(k))));
  }
  return acc;
}

// SINR of the MRC output for one user, conditioned on the realization pair.
// A zero estimate yields zero by convention (the combiner has no output).
template <typename Scalar>
Scalar instantaneous_sinr(const MatrixC<Scalar>& p_hat, const MatrixC<Scalar>& p,
                          const ValidatedConfig<Scalar>& cfg, Index user) {
  const auto pn_hat = p_hat.col(user);
  if (pn_hat.squaredNorm() == Scalar(0)) return Scalar(0);
  const Scalar eta = cfg.eta();
  const Scalar signal =
      cfg.data_power() * eta * eta * std::norm(Complex<Scalar>(pn_hat.dot(p.col(user))));
  return signal / noise_plus_interference(p_hat, p, cfg, user);
}

// Closed-form approximation of the ergodic rate, per user:
//   log2(1 + eta*rho_u*|chi|^2*beta_n*(alpha_n*M + 1) / D),
//   D = rho_u*|chi|^2*(sum(beta) - eta*beta_n)
//       + (1 - eta)*alpha_n*rho_u*|chi|^2*beta_n + sigma^2 + 1.
// The accuracy vector is a parameter so callers can force alpha (e.g. the
// perfect-CSI limit); rate_approx uses the natural LMMSE accuracy.
template <typename Scalar>
VectorR<Scalar> rate_approx_with_accuracy(const ValidatedConfig<Scalar>& cfg,
                                          const VectorR<Scalar>& alpha) {
  if (alpha.size() != cfg.users())
    throw std::invalid_argument("rate_approx_with_accuracy: one accuracy per user required");
  const Scalar eta = cfg.eta();
  const Scalar rho = cfg.data_power();
  const Scalar chi2 = cfg.chi_mag_sq();
  const Scalar m = static_cast<Scalar>(cfg.antennas());
  VectorR<Scalar> rate(cfg.users());
  for (Index n = 0; n < rate.size(); ++n) {
    const Scalar beta = cfg.large_scale()[n];
    const Scalar num = eta * rho * chi2 * beta * (alpha[n] * m + Scalar(1));
    const Scalar den = rho * chi2 * (cfg.beta_sum() - eta * beta) +
                       (Scalar(1) - eta) * alpha[n] * rho * chi2 * beta + cfg.rf_noise_var() +
                       Scalar(1);
    rate[n] = std::log2(Scalar(1) + num / den);
  }
  return rate;
}

template <typename Scalar>
VectorR<Scalar> rate_approx(const ValidatedConfig<Scalar>& cfg) {
  return rate_approx_with_accuracy(cfg, estimation_accuracy(cfg));
}

// Perfect-CSI upper bound (alpha -> 1). Zero transmit power or scale sends
// the denominator term (1+sigma^2)/(eta*rho_u*|chi|^2) to infinity, hence
// zero rate.
template <typename Scalar>
VectorR<Scalar> rate_perfect_csi_bound(const ValidatedConfig<Scalar>& cfg) {
  const Scalar eta = cfg.eta();
  const Scalar rho_chi2 = cfg.data_power() * cfg.chi_mag_sq();
  const Scalar m = static_cast<Scalar>(cfg.antennas());
  if (rho_chi2 == Scalar(0)) return VectorR<Scalar>::Zero(cfg.users());
  VectorR<Scalar> rate(cfg.users());
  for (Index n = 0; n < rate.size(); ++n) {
    const Scalar beta = cfg.large_scale()[n];
    const Scalar den = cfg.beta_sum() / eta + (Scalar(1) / eta - Scalar(2)) * beta +
                       (Scalar(1) + cfg.rf_noise_var()) / (eta * rho_chi2);
    rate[n] = std::log2(Scalar(1) + (beta + m * beta) / den);
  }
  return rate;
}

// Algebraic rearrangement of rate_approx that exposes the hardware terms in
// the denominator; same value, different grouping.
template <typename Scalar>
VectorR<Scalar> rate_simplified(const ValidatedConfig<Scalar>& cfg) {
  const Scalar eta = cfg.eta();
  const Scalar rho_chi2 = cfg.data_power() * cfg.chi_mag_sq();
  const Scalar m = static_cast<Scalar>(cfg.antennas());
  if (rho_chi2 == Scalar(0)) return VectorR<Scalar>::Zero(cfg.users());
  const VectorR<Scalar> alpha = estimation_accuracy(cfg);
  VectorR<Scalar> rate(cfg.users());
  for (Index n = 0; n < rate.size(); ++n) {
    const Scalar beta = cfg.large_scale()[n];
    const Scalar den = cfg.beta_sum() / eta + alpha[n] * beta / eta -
                       (Scalar(1) + alpha[n]) * beta +
                       (Scalar(1) + cfg.rf_noise_var()) / (eta * rho_chi2);
    rate[n] = std::log2(Scalar(1) + beta * (alpha[n] * m + Scalar(1)) / den);
  }
  return rate;
}

// Closed-form second moments of the combiner terms, used as oracles for the
// Monte Carlo chain. Desired: E|p_hat_n^H p_n|^2; crosstalk:
// E sum_{k != n} |p_hat_n^H p_k|^2.
template <typename Scalar>
Scalar expected_desired_power(const ValidatedConfig<Scalar>& cfg, Index n) {
  const Scalar m = static_cast<Scalar>(cfg.antennas());
  const Scalar a = estimation_accuracy(cfg)[n];
  const Scalar beta = cfg.large_scale()[n];
  const Scalar chi4 = cfg.chi_mag_sq() * cfg.chi_mag_sq();
  return m * a * beta * beta * chi4 * (m * a + Scalar(1));
}

template <typename Scalar>
Scalar expected_crosstalk_power(const ValidatedConfig<Scalar>& cfg, Index n) {
  const Scalar m = static_cast<Scalar>(cfg.antennas());
  const Scalar a = estimation_accuracy(cfg)[n];
  const Scalar beta = cfg.large_scale()[n];
  const Scalar chi4 = cfg.chi_mag_sq() * cfg.chi_mag_sq();
  return m * a * beta * chi4 * (cfg.beta_sum() - beta);
}

// Measured signal power and residual (noise-plus-interference) variance of
// the combiner output for a fixed realization pair, from brute-force symbol
// transmission. Oracle for instantaneous_sinr.
template <typename Scalar = double>
struct SymbolOracleResult {
  VectorR<Scalar> signal_power;
  VectorR<Scalar> residual_variance;
};

template <typename Scalar>
SymbolOracleResult<Scalar> symbol_level_sinr_oracle(const ChannelRealization<Scalar>& ch,
                                                    const MatrixC<Scalar>& p_hat,
                                                    const ValidatedConfig<Scalar>& cfg, int trials,
                                                    RandomSource& rng,
                                                    FrontEndToggles toggles = {}) {
  if (trials < 100)
    throw std::invalid_argument("symbol_level_sinr_oracle: need at least 100 symbol draws");
  const Index K = p_hat.cols();
  const Scalar rho = cfg.data_power();
  const Scalar scale = cfg.eta() * std::sqrt(rho);
  const VectorR<Scalar> nq_cov = aqnm_noise_cov(ch.raw, rho, cfg);
  VectorC<Scalar> gains(K);
  for (Index n = 0; n < K; ++n) gains[n] = scale * p_hat.col(n).dot(ch.effective.col(n));

  SymbolOracleResult<Scalar> out;
  out.signal_power = VectorR<Scalar>::Zero(K);
  out.residual_variance = VectorR<Scalar>::Zero(K);
  for (int t = 0; t < trials; ++t) {
    const VectorC<Scalar> x = complex_gaussian_vector<Scalar>(K, rng);
    const VectorC<Scalar> y_rf =
        rf_frontend_output(ch.effective, x, rho, cfg.rf_noise_var(), rng, rng, toggles);
    const VectorC<Scalar> y_q = quantize_aqnm(y_rf, nq_cov, cfg, rng);
    const VectorC<Scalar> r = mrc_combine(p_hat, y_q);
    for (Index n = 0; n < K; ++n) {
      out.signal_power[n] += std::norm(gains[n] * x[n]);
      out.residual_variance[n] += std::norm(r[n] - gains[n] * x[n]);
    }
  }
  out.signal_power /= static_cast<Scalar>(trials);
  out.residual_variance /= static_cast<Scalar>(trials);
  return out;
}

template <typename Scalar = double>
struct RateReport {
  VectorR<Scalar> per_user_mc;
  VectorR<Scalar> per_user_ci95;
  VectorR<Scalar> per_user_approx;
  Scalar sum_mc;
  Scalar sum_ci95;
  Scalar sum_approx;
  int trials;
  std::uint64_t seed;
};

// Monte Carlo ergodic rate through the full chain (channel draw, training,
// LMMSE estimate, conditional MRC SINR), next to the closed-form
// approximation evaluated on the same large-scale gains. With a scenario the
// gains are redrawn every trial and the approximation column is the average
// over those draws.
template <typename Scalar>
RateReport<Scalar> ergodic_rate_mc(const ValidatedConfig<Scalar>& cfg, int trials,
                                   std::uint64_t seed, int threads = 1,
                                   const ScenarioSpec<Scalar>* scenario = nullptr,
                                   std::uint64_t trial_base = 0) {
  if (trials < 2) throw std::invalid_argument("ergodic_rate_mc: need at least two trials");
  const Index K = cfg.users();
  std::vector<VectorR<Scalar>> rate_samples(static_cast<std::size_t>(trials));
  std::vector<VectorR<Scalar>> approx_samples(scenario ? static_cast<std::size_t>(trials) : 0);

  parallel_trials(trials, threads, [&](int t) {
    TrialStreams streams = trial_streams(seed, trial_base + static_cast<std::uint64_t>(t));
    ValidatedConfig<Scalar> trial_cfg = cfg;
    if (scenario) {
      SystemConfig<Scalar> base = cfg.base();
      base.large_scale = drop_users(*scenario, streams.user_drop);
      trial_cfg = ValidatedConfig<Scalar>(base);
      approx_samples[static_cast<std::size_t>(t)] = rate_approx(trial_cfg);
    }
    const ChannelRealization<Scalar> ch = draw_channel(trial_cfg, streams.channel);
    const PilotBlock<Scalar> block = collect_pilot_block(ch, trial_cfg, streams);
    const MatrixC<Scalar> p_hat = lmmse_fast(block, trial_cfg);
    VectorR<Scalar> r(K);
    for (Index n = 0; n < K; ++n)
      r[n] = std::log2(Scalar(1) + instantaneous_sinr(p_hat, ch.effective, trial_cfg, n));
    rate_samples[static_cast<std::size_t>(t)] = std::move(r);
  });

  RateReport<Scalar> report;
  report.trials = trials;
  report.seed = seed;
  report.per_user_mc.resize(K);
  report.per_user_ci95.resize(K);
  std::vector<Scalar> column(static_cast<std::size_t>(trials));
  std::vector<Scalar> sums(static_cast<std::size_t>(trials), Scalar(0));
  for (Index n = 0; n < K; ++n) {
    for (int t = 0; t < trials; ++t) {
      column[static_cast<std::size_t>(t)] = rate_samples[static_cast<std::size_t>(t)][n];
      sums[static_cast<std::size_t>(t)] += rate_samples[static_cast<std::size_t>(t)][n];
    }
    const auto mc = mean_ci(column);
    report.per_user_mc[n] = mc.mean;
    report.per_user_ci95[n] = mc.ci95;
  }
  const auto sum_stats = mean_ci(sums);
  report.sum_mc = sum_stats.mean;
  report.sum_ci95 = sum_stats.ci95;

  if (scenario) {
    report.per_user_approx = VectorR<Scalar>::Zero(K);
    for (const auto& a : approx_samples) report.per_user_approx += a;
    report.per_user_approx /= static_cast<Scalar>(trials);
  } else {
    report.per_user_approx = rate_approx(cfg);
  }
  report.sum_approx = report.per_user_approx.sum();
  return report;
}

}  // namespace qmimo
