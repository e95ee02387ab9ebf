// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jspl/otfs.hpp"
#include "jspl/types.hpp"

namespace jspl {

// One propagation path of the uplink channel seen at the BS array.
struct Path {
  Complex gain;          // complex amplitude
  double delay_s = 0.0;  // tau, seconds; integer multiple of the sample period
  double doppler_hz = 0.0;
  double aod_sin = 0.0;  // d/lambda_c * sin(theta), in [-1/2, 1/2)

  int delayTap(const OtfsConfig& cfg) const;
};

struct PathSet {
  std::vector<Path> paths;
  std::uint64_t seed = 0;
};

struct PathSamplingOptions {
  int n_paths = 4;
  double max_speed_mps = 33.3;
  // Delay taps are drawn from [0, n_delay * overdelay_fraction); the
  // default keeps every tap inside the cyclic prefix at the stock geometry.
  double overdelay_fraction = 0.25;
  bool on_grid = false;      // snap Doppler and angle to grid points
  bool cluster_aod = false;  // draw angles from a narrow burst cluster
};

// Draw a random multipath realization. Delay taps are distinct integers in
// [0, n_cp]; Doppler magnitudes are bounded by max_speed * f_c / c; angles
// are uniform on the grid interval. Deterministic in (cfg, options, seed).
PathSet samplePaths(const OtfsConfig& cfg, const PathSamplingOptions& options,
                    std::uint64_t seed);

void validatePaths(const PathSet& paths, const OtfsConfig& cfg);

// Dense delay-Doppler-angle coefficient tensor, stored flat so the linear
// model sees it as a single column vector (layout: ddaFlatIndex).
class DdaChannel {
 public:
  DdaChannel() = default;
  explicit DdaChannel(const GridDims& dims)
      : dims_(dims), data_(VectorXcd::Zero(dims.colCount())) {}
  DdaChannel(const GridDims& dims, VectorXcd flat);

  const GridDims& dims() const { return dims_; }
  const VectorXcd& flat() const { return data_; }
  VectorXcd& flat() { return data_; }

  Complex& at(int l, int k, int r) { return data_[ddaFlatIndex(dims_, l, k, r)]; }
  Complex at(int l, int k, int r) const { return data_[ddaFlatIndex(dims_, l, k, r)]; }

  double squaredNorm() const { return data_.squaredNorm(); }

 private:
  GridDims dims_;
  VectorXcd data_;
};

// Periodic Dirichlet ratio sin(pi d) / sin(pi d / n), continuously extended
// to n * (-1)^(m(n+1)) at d = m n.
double dirichletRatio(double d, int n);

// Full sampling kernel: dirichletRatio(d, n) * exp(j pi d (n-1) / n).
Complex dirichletKernel(double d, int n);

// Evaluate the on-lattice channel response at one tensor point.
Complex ddaPointResponse(const Path& path, const OtfsConfig& cfg, int l, int k, int r);

// Materialize the full tensor for a path set.
DdaChannel ddaChannel(const PathSet& paths, const OtfsConfig& cfg);

// Per-antenna time-domain propagation of already-modulated frames.
// signals[q] is antenna q's serialized frame. Path delays act circularly
// within each CP-extended symbol; the Doppler phase reference sits at the
// last CP sample of the first symbol so the discrete tensor above matches
// this chain exactly for on-grid paths. Adds CN(0, noise_var) per sample.
VectorXcd applyChannel(const std::vector<VectorXcd>& signals, const PathSet& paths,
                       const OtfsConfig& cfg, double noise_var, std::uint64_t noise_seed);

// JSON round-trip for path sets (delays stored as integer taps).
std::string pathSetToJson(const PathSet& paths, const OtfsConfig& cfg);
PathSet pathSetFromJson(const std::string& text, const OtfsConfig& cfg);
void savePathSet(const PathSet& paths, const OtfsConfig& cfg, const std::string& file);
PathSet loadPathSet(const std::string& file, const OtfsConfig& cfg);

}  // namespace jspl
