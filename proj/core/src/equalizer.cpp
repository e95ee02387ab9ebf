// SPDX-License-Identifier: Apache-2.0
#include "jspl/equalizer.hpp"

#include <cmath>

#include "jspl/otfs.hpp"
#include "jspl/rng.hpp"

namespace jspl {

Complex qpskMap(int b0, int b1) {
  static constexpr double inv_sqrt2 = 0.7071067811865476;
  return {(1 - 2 * b0) * inv_sqrt2, (1 - 2 * b1) * inv_sqrt2};
}

std::pair<int, int> qpskDemap(Complex x) {
  return {x.real() < 0.0 ? 1 : 0, x.imag() < 0.0 ? 1 : 0};
}

MatrixXcd ddChannelMatrix(const DdaChannel& h, const OtfsConfig& cfg, int antenna) {
  const GridDims& dims = h.dims();
  if (dims != cfg.dims()) throw std::invalid_argument("ddChannelMatrix: dims mismatch");
  const int nl = cfg.n_delay, nk = cfg.n_doppler, nt = cfg.n_tx;

  // Angle synthesis back to the requested antenna's DD response.
  MatrixXcd g = MatrixXcd::Zero(nl, nk);
  for (int r = -nt / 2; r < nt / 2; ++r) {
    const Complex w = unitPhasor(2.0 * kPi * antenna * r / nt) / static_cast<double>(nt);
    for (int l = 0; l < nl; ++l)
      for (int k = -nk / 2; k < nk / 2; ++k) g(l, k + nk / 2) += w * h.at(l, k, r);
  }

  const int m_count = dims.rowCount();
  const double phase_denom = static_cast<double>(nk) * cfg.samplesPerSymbol();
  MatrixXcd out(m_count, m_count);
  for (int mc = 0; mc < m_count; ++mc) {
    const auto [lc, kc] = ddRowToIndex(dims, mc);
    for (int m = 0; m < m_count; ++m) {
      const auto [l, k] = ddRowToIndex(dims, m);
      const int dl = ((l - lc) % nl + nl) % nl;
      int dk = k - kc;
      dk = ((dk + nk / 2) % nk + nk) % nk - nk / 2;  // wrapped signed difference
      out(m, mc) = g(dl, dk + nk / 2) / static_cast<double>(nk) *
                   unitPhasor(2.0 * kPi * l * dk / phase_denom);
    }
  }
  return out;
}

VectorXcd mmseEqualize(const MatrixXcd& h_matrix, const VectorXcd& y, double noise_var) {
  if (h_matrix.rows() != y.size()) throw std::invalid_argument("mmseEqualize: size mismatch");
  MatrixXcd gram = h_matrix.adjoint() * h_matrix;
  gram.diagonal().array() += std::max(noise_var, 1e-15);
  return gram.ldlt().solve(h_matrix.adjoint() * y);
}

BerResult berTrial(const DdaChannel& h_for_eq, const PathSet& true_paths,
                   const OtfsConfig& cfg, double snr_db, std::uint64_t data_seed,
                   std::uint64_t noise_seed) {
  cfg.validate();
  const GridDims dims = cfg.dims();
  const int m_count = dims.rowCount();

  Rng data_rng(data_seed);
  std::vector<int> bits(2 * m_count);
  for (int& b : bits) b = data_rng.uniformInt(0, 1);
  VectorXcd x(m_count);
  for (int i = 0; i < m_count; ++i) x[i] = qpskMap(bits[2 * i], bits[2 * i + 1]);

  std::vector<VectorXcd> frames(cfg.n_tx, VectorXcd::Zero(cfg.frameSamples()));
  frames[0] = otfsModulate(ddVectorToGrid(x, dims), cfg);

  const VectorXcd clean = applyChannel(frames, true_paths, cfg, 0.0, 0);
  double noise_var = 0.0;
  if (std::isfinite(snr_db)) {
    const double rx_power = clean.squaredNorm() / static_cast<double>(clean.size());
    noise_var = rx_power * std::pow(10.0, -snr_db / 10.0);
  }
  VectorXcd received = clean;
  if (noise_var > 0.0) {
    Rng noise_rng(noise_seed);
    for (Eigen::Index i = 0; i < received.size(); ++i)
      received[i] += noise_rng.complexGaussian(noise_var);
  }

  const VectorXcd y = ddGridToVector(otfsDemodulate(received, cfg));
  const MatrixXcd h_matrix = ddChannelMatrix(h_for_eq, cfg, 0);
  const VectorXcd x_hat = mmseEqualize(h_matrix, y, noise_var);

  BerResult out;
  out.bits = 2 * m_count;
  for (int i = 0; i < m_count; ++i) {
    const auto [b0, b1] = qpskDemap(x_hat[i]);
    out.bit_errors += (b0 != bits[2 * i]) + (b1 != bits[2 * i + 1]);
  }
  out.ber = static_cast<double>(out.bit_errors) / static_cast<double>(out.bits);
  return out;
}

}  // namespace jspl
