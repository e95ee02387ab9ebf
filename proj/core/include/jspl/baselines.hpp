// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "jspl/measurement.hpp"

namespace jspl {

struct OmpConfig {
  int max_atoms = 64;
  double residual_tol = 1e-4;  // relative to the observation norm
  // Block extents (delay, doppler, angle) used by the structured variant;
  // it needs the burst geometry up front.
  std::array<int, 3> block_dims = {1, 3, 3};

  void validate() const;
};

struct SparseRecoveryResult {
  DdaChannel estimate;
  std::vector<Eigen::Index> support;  // sorted column indices
  int n_rounds = 0;
  double residual_norm = 0.0;  // final, relative to the observation norm
};

// Classic orthogonal matching pursuit on column-normalized atoms with a
// full least-squares re-fit per round.
SparseRecoveryResult omp(const MeasurementModel& model, const OmpConfig& cfg);

// Structured variant: each round picks the delay tap with the largest
// correlation-energy slice, then the dominant Doppler-angle block of extent
// block_dims inside it (Doppler truncates at the band edges, angle wraps).
SparseRecoveryResult somp3d(const MeasurementModel& model, const OmpConfig& cfg);

}  // namespace jspl
