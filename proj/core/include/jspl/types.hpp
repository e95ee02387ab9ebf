// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace jspl {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

inline Complex unitPhasor(double angle) { return {std::cos(angle), std::sin(angle)}; }

// Grid extents of the delay-Doppler-angle tensor.
// Doppler index k and angle index r run over signed ranges
// [-n_doppler/2, n_doppler/2) and [-n_tx/2, n_tx/2); storage uses
// the shifted indices k + n_doppler/2 and r + n_tx/2.
struct GridDims {
  int n_delay = 0;
  int n_doppler = 0;
  int n_tx = 0;

  int rowCount() const { return n_delay * n_doppler; }          // M
  Eigen::Index colCount() const {
    return static_cast<Eigen::Index>(n_delay) * n_doppler * n_tx;  // N
  }

  bool operator==(const GridDims&) const = default;
};

// Row index of a received DD sample: delay-major, Doppler within.
inline int ddRowIndex(const GridDims& d, int l, int k) {
  return l * d.n_doppler + (k + d.n_doppler / 2);
}

inline std::pair<int, int> ddRowToIndex(const GridDims& d, int m) {
  return {m / d.n_doppler, m % d.n_doppler - d.n_doppler / 2};
}

// Flat index of a DDA coefficient. Angle blocks are outermost so the
// operator's column blocks line up one per angle bin; within a block the
// layout matches ddRowIndex (delay-major, Doppler within).
inline Eigen::Index ddaFlatIndex(const GridDims& d, int l, int k, int r) {
  return static_cast<Eigen::Index>(r + d.n_tx / 2) * d.rowCount() + ddRowIndex(d, l, k);
}

struct DdaIndex {
  int l, k, r;
};

inline DdaIndex ddaFlatToIndex(const GridDims& d, Eigen::Index n) {
  const int m = static_cast<int>(n % d.rowCount());
  const int r = static_cast<int>(n / d.rowCount()) - d.n_tx / 2;
  auto [l, k] = ddRowToIndex(d, m);
  return {l, k, r};
}

}  // namespace jspl
