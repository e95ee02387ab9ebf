// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "jspl/channel.hpp"

namespace jspl {

// QPSK with Gray labelling: bit pair (b0, b1) -> ((1-2 b0) + j (1-2 b1))/sqrt(2).
Complex qpskMap(int b0, int b1);
std::pair<int, int> qpskDemap(Complex x);

// Dense DD-domain input-output matrix of a channel estimate as seen from
// one transmit antenna: row (l,k), column (l',k') carries the cyclic
// difference response and the delay-Doppler cross phase.
MatrixXcd ddChannelMatrix(const DdaChannel& h, const OtfsConfig& cfg, int antenna);

// Linear MMSE equalization: (H^H H + noise_var I)^{-1} H^H y.
VectorXcd mmseEqualize(const MatrixXcd& h_matrix, const VectorXcd& y, double noise_var);

struct BerResult {
  long bit_errors = 0;
  long bits = 0;
  double ber = 0.0;
};

// One QPSK data frame on antenna 0 through the physical channel, equalized
// with the supplied channel estimate. Identical seeds give identical data
// and noise, so estimates can be compared on paired frames.
BerResult berTrial(const DdaChannel& h_for_eq, const PathSet& true_paths,
                   const OtfsConfig& cfg, double snr_db, std::uint64_t data_seed,
                   std::uint64_t noise_seed);

}  // namespace jspl
