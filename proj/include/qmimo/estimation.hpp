#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "qmimo/channel.hpp"
#include "qmimo/config.hpp"
#include "qmimo/parallel.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/scenario.hpp"
#include "qmimo/stats.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

class FloorUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Unitary-up-to-scale DFT training matrix, pilot_length x num_users:
// entry (t, j) = exp(-2*pi*i*t*j/pilot_length). Columns are orthogonal with
// squared norm pilot_length.
template <typename Scalar = double>
MatrixC<Scalar> dft_pilots(Index pilot_length, Index num_users) {
  if (num_users > pilot_length)
    throw std::invalid_argument("dft_pilots: need pilot_length >= num_users");
  MatrixC<Scalar> phi(pilot_length, num_users);
  for (Index j = 0; j < num_users; ++j)
    for (Index t = 0; t < pilot_length; ++t) {
      // Reduce the phase index first; keeps large products accurate.
      const Index idx = (t * j) % pilot_length;
      const Scalar angle = Scalar(-2) * std::numbers::pi_v<Scalar> * static_cast<Scalar>(idx) /
                           static_cast<Scalar>(pilot_length);
      phi(t, j) = std::polar(Scalar(1), angle);
    }
  return phi;
}

// Quantized observations of one training phase. observations column t is the
// ADC output while pilot row t is on the air.
template <typename Scalar = double>
struct PilotBlock {
  MatrixC<Scalar> pilots;        // pilot_length x num_users
  MatrixC<Scalar> observations;  // antennas x pilot_length
};

template <typename Scalar>
PilotBlock<Scalar> collect_pilot_block(const ChannelRealization<Scalar>& ch,
                                       const ValidatedConfig<Scalar>& cfg, TrialStreams& streams,
                                       FrontEndToggles toggles = {}) {
  PilotBlock<Scalar> block;
  block.pilots = dft_pilots<Scalar>(cfg.pilot_length(), cfg.users());
  block.observations.resize(ch.raw.rows(), cfg.pilot_length());
  const VectorR<Scalar> nq_cov = aqnm_noise_cov(ch.raw, cfg.pilot_power(), cfg);
  for (Index t = 0; t < block.pilots.rows(); ++t) {
    const VectorC<Scalar> y_rf =
        rf_frontend_output(ch.effective, block.pilots.row(t).transpose(), cfg.pilot_power(),
                           cfg.rf_noise_var(), streams.rf_noise, streams.thermal_noise, toggles);
    block.observations.col(t) = quantize_aqnm(y_rf, nq_cov, cfg, streams.quant_noise);
  }
  return block;
}

// Per-user estimation accuracy: the fraction of a user's effective-channel
// power captured by the linear MMSE estimate,
//   alpha_k = eta*rho_p*tau*|chi|^2*beta_k /
//             (eta*rho_p*tau*|chi|^2*beta_k + (1-eta)*rho_p*|chi|^2*sum(beta) + sigma^2 + 1).
template <typename Scalar>
VectorR<Scalar> estimation_accuracy(const ValidatedConfig<Scalar>& cfg) {
  const Scalar eta = cfg.eta();
  const Scalar rho = cfg.pilot_power();
  const Scalar tau = static_cast<Scalar>(cfg.pilot_length());
  const Scalar cross = (Scalar(1) - eta) * rho * cfg.chi_mag_sq() * cfg.beta_sum() +
                       cfg.rf_noise_var() + Scalar(1);
  VectorR<Scalar> alpha(cfg.users());
  for (Index k = 0; k < alpha.size(); ++k) {
    const Scalar sig = eta * rho * tau * cfg.chi_mag_sq() * cfg.large_scale()[k];
    alpha[k] = sig / (sig + cross);
  }
  return alpha;
}

// Mean-square channel estimation error per antenna-user coefficient.
template <typename Scalar>
Scalar analytic_mse(const ValidatedConfig<Scalar>& cfg) {
  const VectorR<Scalar> alpha = estimation_accuracy(cfg);
  Scalar acc = 0;
  for (Index k = 0; k < alpha.size(); ++k)
    acc += cfg.large_scale()[k] * (Scalar(1) - alpha[k]);
  return cfg.chi_mag_sq() * acc / static_cast<Scalar>(cfg.users());
}

// Infinite-pilot-power limit of analytic_mse. Only meaningful for the square
// training layout (pilot_length == num_users), where the residual floor comes
// purely from quantization cross-talk.
template <typename Scalar>
Scalar mse_floor(const ValidatedConfig<Scalar>& cfg) {
  if (cfg.pilot_length() != cfg.users())
    throw FloorUndefined("mse_floor: defined only when pilot_length == num_users");
  const Scalar eta = cfg.eta();
  const Scalar K = static_cast<Scalar>(cfg.users());
  Scalar acc = 0;
  for (Index k = 0; k < cfg.users(); ++k) {
    const Scalar beta = cfg.large_scale()[k];
    const Scalar denom = eta * K * beta + (Scalar(1) - eta) * cfg.beta_sum();
    const Scalar limit_alpha = denom > Scalar(0) ? eta * K * beta / denom : Scalar(0);
    acc += beta * (Scalar(1) - limit_alpha);
  }
  return cfg.chi_mag_sq() * acc / K;
}

// Reference LMMSE estimator, built from the full covariance matrices of the
// vectorized observation. Quadratic memory and cubic solve cost; guarded to
// small problems. Exists as an oracle for lmmse_fast.
template <typename Scalar>
MatrixC<Scalar> lmmse_dense(const PilotBlock<Scalar>& block, const ValidatedConfig<Scalar>& cfg) {
  const Index M = block.observations.rows();
  const Index tau = block.pilots.rows();
  const Index K = block.pilots.cols();
  if (M * tau > 4096)
    throw std::invalid_argument("lmmse_dense: problem too large; use lmmse_fast");
  if (M != cfg.antennas() || tau != cfg.pilot_length() || K != cfg.users())
    throw std::invalid_argument("lmmse_dense: block does not match config");
  const Scalar eta = cfg.eta();
  const Scalar rho = cfg.pilot_power();
  if (rho == Scalar(0)) return MatrixC<Scalar>::Zero(M, K);

  // Prior covariance of the vectorized effective channel is diagonal:
  // |chi|^2 * beta_k for each of the M coefficients of user k.
  VectorR<Scalar> c_p(M * K);
  for (Index k = 0; k < K; ++k)
    c_p.segment(k * M, M).setConstant(cfg.chi_mag_sq() * cfg.large_scale()[k]);

  const MatrixC<Scalar> phi_bar =
      Eigen::kroneckerProduct(block.pilots, MatrixC<Scalar>::Identity(M, M));
  const Scalar noise = eta * ((Scalar(1) - eta) * rho * cfg.chi_mag_sq() * cfg.beta_sum() +
                              cfg.rf_noise_var() + Scalar(1));
  MatrixC<Scalar> c_zq = eta * eta * rho *
                         (phi_bar * c_p.template cast<Complex<Scalar>>().asDiagonal() *
                          phi_bar.adjoint());
  c_zq.diagonal().array() += noise;

  const VectorC<Scalar> z = Eigen::Map<const VectorC<Scalar>>(block.observations.data(), M * tau);
  Eigen::LLT<MatrixC<Scalar>> llt(c_zq);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("lmmse_dense: observation covariance not positive definite");
  const VectorC<Scalar> w = llt.solve(z);
  const VectorC<Scalar> p_hat_vec =
      eta * std::sqrt(rho) *
      (c_p.template cast<Complex<Scalar>>().asDiagonal() * (phi_bar.adjoint() * w));
  return Eigen::Map<const MatrixC<Scalar>>(p_hat_vec.data(), M, K);
}

// Production LMMSE path. Orthogonal pilots make the vectorized covariances
// jointly diagonalizable, so the estimate reduces to a per-user scaling of
// the pilot-matched filter:
//   p_hat_k = (Z_q * conj(Phi))_k * alpha_k / (eta * sqrt(rho_p) * tau).
template <typename Scalar>
MatrixC<Scalar> lmmse_fast(const PilotBlock<Scalar>& block, const ValidatedConfig<Scalar>& cfg) {
  const Index M = block.observations.rows();
  const Index K = block.pilots.cols();
  if (M != cfg.antennas() || block.pilots.rows() != cfg.pilot_length() || K != cfg.users())
    throw std::invalid_argument("lmmse_fast: block does not match config");
  const Scalar rho = cfg.pilot_power();
  if (rho == Scalar(0)) return MatrixC<Scalar>::Zero(M, K);
  const VectorR<Scalar> alpha = estimation_accuracy(cfg);
  MatrixC<Scalar> p_hat = block.observations * block.pilots.conjugate();
  const Scalar tau = static_cast<Scalar>(cfg.pilot_length());
  for (Index k = 0; k < K; ++k)
    p_hat.col(k) *= alpha[k] / (cfg.eta() * std::sqrt(rho) * tau);
  return p_hat;
}

template <typename Scalar = double>
struct ChannelEstimate {
  MatrixC<Scalar> p_hat;
  VectorR<Scalar> alpha;
  Scalar mse;  // analytic per-coefficient error for this configuration
};

template <typename Scalar>
ChannelEstimate<Scalar> estimate_channel(const PilotBlock<Scalar>& block,
                                         const ValidatedConfig<Scalar>& cfg) {
  return {lmmse_fast(block, cfg), estimation_accuracy(cfg), analytic_mse(cfg)};
}

// Monte Carlo estimate of the per-coefficient estimation error
// ||P_hat - P||_F^2 / (M*K), averaged over channel and noise.
// When a scenario is supplied, large-scale gains are redrawn every trial.
// trial_base offsets the trial ids so independent sweep points never share
// random streams.
template <typename Scalar>
MeanCi<Scalar> empirical_mse(const ValidatedConfig<Scalar>& cfg, int trials, std::uint64_t seed,
                             int threads = 1, const ScenarioSpec<Scalar>* scenario = nullptr,
                             std::uint64_t trial_base = 0) {
  if (trials < 2) throw std::invalid_argument("empirical_mse: need at least two trials");
  std::vector<Scalar> samples(static_cast<std::size_t>(trials));
  const Scalar denom = static_cast<Scalar>(cfg.antennas()) * static_cast<Scalar>(cfg.users());
  parallel_trials(trials, threads, [&](int t) {
    TrialStreams streams = trial_streams(seed, trial_base + static_cast<std::uint64_t>(t));
    ValidatedConfig<Scalar> trial_cfg = cfg;
    if (scenario) {
      SystemConfig<Scalar> base = cfg.base();
      base.large_scale = drop_users(*scenario, streams.user_drop);
      trial_cfg = ValidatedConfig<Scalar>(base);
    }
    const ChannelRealization<Scalar> ch = draw_channel(trial_cfg, streams.channel);
    const PilotBlock<Scalar> block = collect_pilot_block(ch, trial_cfg, streams);
    const MatrixC<Scalar> p_hat = lmmse_fast(block, trial_cfg);
    samples[static_cast<std::size_t>(t)] = (p_hat - ch.effective).squaredNorm() / denom;
  });
  return mean_ci(samples);
}

}  // namespace qmimo
