// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <limits>
#include <memory>
#include <string>

#include "jspl/channel.hpp"
#include "jspl/dd_operator.hpp"

namespace jspl {

// One estimation frame: received DD samples, the operator that explains
// them, and bookkeeping. noise_var is the generator's ground truth and is
// not consumed by the estimators.
struct MeasurementModel {
  VectorXcd y;
  std::shared_ptr<const DdOperator> op;
  double noise_var = 0.0;
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t noise_seed = 0;

  const OtfsConfig& config() const { return op->config(); }
  const GridDims& dims() const { return op->dims(); }
};

// Generate an observation through the full physical chain (modulate the
// pilot grids per antenna, propagate, demodulate), not through the linear
// model, so any model mismatch is present in y. Noise power is set from
// snr_db relative to the noiseless received power; pass +infinity for a
// noiseless frame.
MeasurementModel observe(const PathSet& paths, const PilotPattern& pilots,
                         const OtfsConfig& cfg, double snr_db, std::uint64_t noise_seed,
                         Eigen::Index max_dense_elements = DdOperator::kDefaultDenseBudget);

// Same observation, reusing an already-built operator (its pilot pattern
// and geometry are the ones transmitted).
MeasurementModel observe(const PathSet& paths, std::shared_ptr<const DdOperator> op,
                         double snr_db, std::uint64_t noise_seed);

// Binary container round-trip: little-endian IEEE-754 doubles (interleaved
// re/im) behind a JSON header. The operator is rebuilt from the stored
// pilot pattern on load.
void saveMeasurement(const MeasurementModel& model, const std::string& file);
MeasurementModel loadMeasurement(const std::string& file,
                                 Eigen::Index max_dense_elements = DdOperator::kDefaultDenseBudget);

}  // namespace jspl
