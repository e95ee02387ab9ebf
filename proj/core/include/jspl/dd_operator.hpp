// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "jspl/pilot.hpp"
#include "jspl/types.hpp"

namespace jspl {

// Linear map from the flattened delay-Doppler-angle coefficient vector h to
// the received DD samples y. Column blocks are per-angle-bin; each block is
// the elementwise product of a delay-Doppler phase matrix C and a cyclic
// 2D convolution matrix built from the pilot grids. The per-symbol DFT and
// angle synthesis normalizations (1/n_doppler and 1/n_tx) are folded into
// the convolution kernel.
class DdOperator {
 public:
  static constexpr Eigen::Index kDefaultDenseBudget = Eigen::Index{1} << 23;

  DdOperator(const PilotPattern& pilots, const OtfsConfig& cfg,
             Eigen::Index max_dense_elements = kDefaultDenseBudget);

  int rows() const { return dims_.rowCount(); }
  Eigen::Index cols() const { return dims_.colCount(); }
  const GridDims& dims() const { return dims_; }
  const OtfsConfig& config() const { return cfg_; }
  const PilotPattern& pilots() const { return pilots_; }

  VectorXcd apply(const VectorXcd& h) const;
  VectorXcd applyAdjoint(const VectorXcd& u) const;
  VectorXd applyAbsSquared(const VectorXd& v) const;
  VectorXd applyAbsSquaredAdjoint(const VectorXd& w) const;

  const VectorXd& columnSquaredNorms() const { return col_sq_norms_; }

  Complex entry(int m, Eigen::Index n) const;
  VectorXcd column(Eigen::Index n) const;

  bool denseAvailable() const { return dense_.size() > 0; }
  const MatrixXcd& dense() const;
  const MatrixXd& denseAbsSquared() const;

  // Structure probes: the phase matrix C and the angle-bin convolution
  // block for signed bin r (normalization folded in), so that the dense
  // operator's block r equals phaseMatrix() .* angleBlock(r).
  MatrixXcd phaseMatrix() const;
  MatrixXcd angleBlock(int r) const;

 private:
  Complex kernelAt(int ri, int dl, int dk_raw) const;
  Complex cPhase(int l, int k_col) const;

  OtfsConfig cfg_;
  PilotPattern pilots_;
  GridDims dims_;
  std::vector<MatrixXcd> kernel_;  // per angle bin: grid of x-tilde values
  VectorXd col_sq_norms_;
  MatrixXcd dense_;   // empty when over the element budget
  MatrixXd dense2_;
};

}  // namespace jspl
