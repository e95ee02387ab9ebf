// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "jspl/otfs.hpp"
#include "jspl/types.hpp"

namespace jspl {

// Pilot placement in the DD grid plus the per-antenna symbols carried there.
// positions[i] = (l, k) with k in signed natural order; symbols(i, q) is the
// value antenna q transmits at positions[i]. All non-pilot positions are
// zero during estimation frames.
struct PilotPattern {
  std::vector<std::pair<int, int>> positions;
  MatrixXcd symbols;  // n_positions x n_tx, unit-modulus QPSK
  double overhead = 0.0;
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(positions.size()); }

  // Materialize antenna q's transmit grid (n_delay x n_doppler).
  MatrixXcd grid(const OtfsConfig& cfg, int q) const;

  // Value of x^DD_{l,k,q}, zero off-pattern. Index pair in signed order.
  Complex symbolAt(int l, int k, int q) const;

  void validate(const OtfsConfig& cfg) const;
};

// Centered contiguous rectangle covering ceil(overhead * n_delay * n_doppler)
// positions, row-major from its top-left corner. Symbols drawn per antenna
// from the seed.
PilotPattern makePilotPattern(const OtfsConfig& cfg, double overhead, std::uint64_t seed);

}  // namespace jspl
