// SPDX-License-Identifier: Apache-2.0
#include "jspl/otfs.hpp"

#include "jspl/dft.hpp"

namespace jspl {

void OtfsConfig::validate() const {
  if (n_delay <= 0 || n_doppler <= 0 || n_tx <= 0)
    throw std::invalid_argument("OtfsConfig: grid extents must be positive");
  if (n_doppler % 2 != 0) throw std::invalid_argument("OtfsConfig: n_doppler must be even");
  if (n_tx % 2 != 0) throw std::invalid_argument("OtfsConfig: n_tx must be even");
  if (n_cp < 0 || n_cp >= n_delay)
    throw std::invalid_argument("OtfsConfig: need 0 <= n_cp < n_delay");
  if (!(subcarrier_spacing > 0.0) || !(carrier_freq > 0.0))
    throw std::invalid_argument("OtfsConfig: frequencies must be positive");
}

MatrixXcd isfft(const MatrixXcd& dd) {
  const int nl = static_cast<int>(dd.rows());
  const int nk = static_cast<int>(dd.cols());
  return dftMatrix(nl) * dopplerNaturalToDft(dd) * idftMatrix(nk);
}

MatrixXcd sfft(const MatrixXcd& tf) {
  const int nl = static_cast<int>(tf.rows());
  const int nk = static_cast<int>(tf.cols());
  return dopplerDftToNatural(idftMatrix(nl) * tf * dftMatrix(nk));
}

VectorXcd otfsModulate(const MatrixXcd& dd, const OtfsConfig& cfg,
                       const std::optional<VectorXcd>& tx_window) {
  cfg.validate();
  if (dd.rows() != cfg.n_delay || dd.cols() != cfg.n_doppler)
    throw std::invalid_argument("otfsModulate: grid does not match config");
  if (tx_window && tx_window->size() != cfg.n_delay)
    throw std::invalid_argument("otfsModulate: window length must equal n_delay");

  // Per-symbol IDFT of the TF grid; the subcarrier DFT from the ISFFT and
  // the OFDM IDFT cancel, but both are kept explicit so windows sit in the
  // documented place in the chain.
  MatrixXcd time = idftMatrix(cfg.n_delay) * isfft(dd);
  if (tx_window) time = tx_window->asDiagonal() * time;

  const int sym = cfg.samplesPerSymbol();
  VectorXcd out(cfg.frameSamples());
  for (int n = 0; n < cfg.n_doppler; ++n) {
    out.segment(static_cast<Eigen::Index>(n) * sym, cfg.n_cp) =
        time.col(n).tail(cfg.n_cp);
    out.segment(static_cast<Eigen::Index>(n) * sym + cfg.n_cp, cfg.n_delay) = time.col(n);
  }
  return out;
}

MatrixXcd otfsDemodulate(const VectorXcd& samples, const OtfsConfig& cfg,
                         const std::optional<VectorXcd>& rx_window) {
  cfg.validate();
  if (samples.size() != cfg.frameSamples())
    throw std::invalid_argument("otfsDemodulate: sample count does not match config");
  if (rx_window && rx_window->size() != cfg.n_delay)
    throw std::invalid_argument("otfsDemodulate: window length must equal n_delay");

  const int sym = cfg.samplesPerSymbol();
  MatrixXcd time(cfg.n_delay, cfg.n_doppler);
  for (int n = 0; n < cfg.n_doppler; ++n) {
    time.col(n) = samples.segment(static_cast<Eigen::Index>(n) * sym + cfg.n_cp, cfg.n_delay);
  }
  if (rx_window) time = rx_window->asDiagonal() * time;
  return sfft(dftMatrix(cfg.n_delay) * time);
}

VectorXcd ddGridToVector(const MatrixXcd& dd) {
  const int nl = static_cast<int>(dd.rows());
  const int nk = static_cast<int>(dd.cols());
  VectorXcd y(static_cast<Eigen::Index>(nl) * nk);
  for (int l = 0; l < nl; ++l)
    for (int c = 0; c < nk; ++c) y[static_cast<Eigen::Index>(l) * nk + c] = dd(l, c);
  return y;
}

MatrixXcd ddVectorToGrid(const VectorXcd& y, const GridDims& dims) {
  if (y.size() != dims.rowCount())
    throw std::invalid_argument("ddVectorToGrid: length does not match dims");
  MatrixXcd dd(dims.n_delay, dims.n_doppler);
  for (int l = 0; l < dims.n_delay; ++l)
    for (int c = 0; c < dims.n_doppler; ++c)
      dd(l, c) = y[static_cast<Eigen::Index>(l) * dims.n_doppler + c];
  return dd;
}

}  // namespace jspl
