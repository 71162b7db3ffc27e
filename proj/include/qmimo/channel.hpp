#pragma once

#include <cmath>
#include <stdexcept>

#include "qmimo/config.hpp"
#include "qmimo/rng.hpp"
#include "qmimo/types.hpp"

namespace qmimo {

// One coherence block of the channel. `raw` is the physical Rayleigh-faded
// matrix (antennas x users, column k scaled by sqrt(beta_k)); `effective` is
// what the receiver actually works through: raw scaled by the common
// front-end gain chi.
template <typename Scalar = double>
struct ChannelRealization {
  MatrixC<Scalar> raw;
  MatrixC<Scalar> effective;
};

template <typename Scalar>
ChannelRealization<Scalar> draw_channel(Index antennas, const VectorR<Scalar>& large_scale,
                                        Complex<Scalar> chi, RandomSource& rng) {
  ChannelRealization<Scalar> ch;
  ch.raw = complex_gaussian_matrix<Scalar>(antennas, large_scale.size(), rng);
  for (Index k = 0; k < large_scale.size(); ++k) ch.raw.col(k) *= std::sqrt(large_scale[k]);
  ch.effective = chi * ch.raw;
  return ch;
}

template <typename Scalar>
ChannelRealization<Scalar> draw_channel(const ValidatedConfig<Scalar>& cfg, RandomSource& rng) {
  return draw_channel(cfg.antennas(), cfg.large_scale(), cfg.chi(), rng);
}

// Test hooks for the additive noise terms; production paths leave both on.
struct FrontEndToggles {
  bool rf_noise = true;
  bool thermal_noise = true;
};

// Analog front-end output for one symbol interval: sqrt(rho) * P * x plus
// front-end distortion (variance rf_noise_var per antenna) plus unit-variance
// thermal noise. Distortion is drawn before thermal noise.
template <typename DerivedP, typename DerivedX>
VectorC<RealOf<DerivedP>> rf_frontend_output(const Eigen::MatrixBase<DerivedP>& effective,
                                             const Eigen::MatrixBase<DerivedX>& symbols,
                                             RealOf<DerivedP> rho, RealOf<DerivedP> rf_noise_var,
                                             RandomSource& rf_rng, RandomSource& thermal_rng,
                                             FrontEndToggles toggles = {}) {
  using Scalar = RealOf<DerivedP>;
  if (symbols.cols() != 1 || symbols.rows() != effective.cols())
    throw std::invalid_argument("rf_frontend_output: symbol vector must have one entry per user");
  if (rho < Scalar(0) || rf_noise_var < Scalar(0))
    throw std::invalid_argument("rf_frontend_output: rho and rf_noise_var must be >= 0");
  VectorC<Scalar> y = std::sqrt(rho) * (effective * symbols);
  if (toggles.rf_noise && rf_noise_var > Scalar(0))
    y += std::sqrt(rf_noise_var) * complex_gaussian_vector<Scalar>(y.size(), rf_rng);
  if (toggles.thermal_noise) y += complex_gaussian_vector<Scalar>(y.size(), thermal_rng);
  return y;
}

template <typename DerivedP, typename DerivedX>
VectorC<RealOf<DerivedP>> rf_frontend_output(const Eigen::MatrixBase<DerivedP>& effective,
                                             const Eigen::MatrixBase<DerivedX>& symbols,
                                             RealOf<DerivedP> rho,
                                             const ValidatedConfig<RealOf<DerivedP>>& cfg,
                                             RandomSource& rng, FrontEndToggles toggles = {}) {
  return rf_frontend_output(effective, symbols, rho, cfg.rf_noise_var(), rng, rng, toggles);
}

// Diagonal of the quantization-noise covariance, conditioned on the channel
// realization: eta*(1-eta) * (rho*|chi|^2*(G G^H)_mm + 1 + sigma^2) per
// antenna. Valid for any transmit power rho (training or data), assuming
// unit-power symbols.
template <typename DerivedG>
VectorR<RealOf<DerivedG>> aqnm_noise_cov(const Eigen::MatrixBase<DerivedG>& raw,
                                         RealOf<DerivedG> rho,
                                         const ValidatedConfig<RealOf<DerivedG>>& cfg) {
  using Scalar = RealOf<DerivedG>;
  if (rho < Scalar(0)) throw std::invalid_argument("aqnm_noise_cov: rho must be >= 0");
  const Scalar scale = cfg.eta() * (Scalar(1) - cfg.eta());
  return (scale * (rho * cfg.chi_mag_sq() * raw.rowwise().squaredNorm().array() + Scalar(1) +
                   cfg.rf_noise_var()))
      .matrix();
}

// Quantizer output under the additive noise model: y_q = eta * y_rf + n_q,
// with n_q gaussian of the given per-antenna variance, independent across
// antennas.
template <typename DerivedY, typename DerivedV>
VectorC<RealOf<DerivedY>> quantize_aqnm(const Eigen::MatrixBase<DerivedY>& y_rf,
                                        const Eigen::MatrixBase<DerivedV>& nq_cov_diag,
                                        const ValidatedConfig<RealOf<DerivedY>>& cfg,
                                        RandomSource& rng) {
  using Scalar = RealOf<DerivedY>;
  if (nq_cov_diag.size() != y_rf.size() || nq_cov_diag.cols() != 1)
    throw std::invalid_argument("quantize_aqnm: need one noise variance per antenna");
  VectorC<Scalar> y = cfg.eta() * y_rf;
  for (Index m = 0; m < y.size(); ++m) {
    const Scalar var = nq_cov_diag[m];
    if (var < Scalar(0)) throw std::invalid_argument("quantize_aqnm: negative noise variance");
    if (var > Scalar(0)) {
      const auto z = rng.complex_gaussian();
      y[m] += std::sqrt(var) * Complex<Scalar>(static_cast<Scalar>(z.real()),
                                               static_cast<Scalar>(z.imag()));
    }
  }
  return y;
}

}  // namespace qmimo
