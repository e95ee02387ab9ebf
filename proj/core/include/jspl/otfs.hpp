// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "jspl/types.hpp"

namespace jspl {

// Frame geometry for one OTFS transmission. Delay bins double as
// subcarriers (n_delay of them) and Doppler bins as OFDM symbols per frame.
struct OtfsConfig {
  int n_delay = 32;                  // subcarriers / delay bins
  int n_doppler = 16;                // OFDM symbols / Doppler bins, even
  int n_cp = 8;                      // cyclic prefix length in samples
  int n_tx = 16;                     // transmit antennas, even
  double subcarrier_spacing = 15e3;  // Hz
  double carrier_freq = 4.9e9;       // Hz

  double samplePeriod() const { return 1.0 / (n_delay * subcarrier_spacing); }
  int samplesPerSymbol() const { return n_delay + n_cp; }
  double symbolDuration() const { return samplesPerSymbol() * samplePeriod(); }
  int frameSamples() const { return samplesPerSymbol() * n_doppler; }
  double dopplerResolution() const { return 1.0 / (n_doppler * symbolDuration()); }

  GridDims dims() const { return {n_delay, n_doppler, n_tx}; }

  void validate() const;
};

// ISFFT: delay-Doppler grid (natural Doppler order) -> time-frequency grid.
// SFFT is its inverse. Both are unitary.
MatrixXcd isfft(const MatrixXcd& dd);
MatrixXcd sfft(const MatrixXcd& tf);

// Modulate one antenna's DD grid (n_delay x n_doppler, natural Doppler
// order) to serialized time samples with per-symbol CP. The optional
// window applies per time sample within each symbol before CP insertion.
VectorXcd otfsModulate(const MatrixXcd& dd, const OtfsConfig& cfg,
                       const std::optional<VectorXcd>& tx_window = std::nullopt);

// Inverse chain: strip CP, optional receive window, back to a DD grid.
MatrixXcd otfsDemodulate(const VectorXcd& samples, const OtfsConfig& cfg,
                         const std::optional<VectorXcd>& rx_window = std::nullopt);

// Serialize a received DD grid to the measurement vector ordering
// (delay-major, Doppler within; see ddRowIndex) and back.
VectorXcd ddGridToVector(const MatrixXcd& dd);
MatrixXcd ddVectorToGrid(const VectorXcd& y, const GridDims& dims);

}  // namespace jspl
