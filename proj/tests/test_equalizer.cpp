// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "jspl/equalizer.hpp"
#include "jspl/rng.hpp"

using namespace jspl;

namespace {

OtfsConfig smallConfig() {
  OtfsConfig cfg;
  cfg.n_delay = 16;
  cfg.n_doppler = 8;
  cfg.n_cp = 4;
  cfg.n_tx = 4;
  return cfg;
}

PathSet onGridPaths(const OtfsConfig& cfg, int n, std::uint64_t seed) {
  PathSamplingOptions opts;
  opts.n_paths = n;
  opts.on_grid = true;
  return samplePaths(cfg, opts, seed);
}

}  // namespace

TEST_CASE("qpsk mapping round-trips and is Gray labelled") {
  for (int b0 = 0; b0 < 2; ++b0)
    for (int b1 = 0; b1 < 2; ++b1) {
      const Complex x = qpskMap(b0, b1);
      CHECK(std::abs(std::abs(x) - 1.0) < 1e-15);
      const auto [c0, c1] = qpskDemap(x);
      CHECK(c0 == b0);
      CHECK(c1 == b1);
    }
  // angularly adjacent constellation points differ in exactly one bit
  const std::vector<std::pair<int, int>> ring = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto [a0, a1] = ring[i];
    const auto [b0, b1] = ring[(i + 1) % ring.size()];
    CHECK((a0 != b0) + (a1 != b1) == 1);
  }
  // demapping is decided by the signs alone
  CHECK(qpskDemap({-0.2, 3.0}) == std::pair<int, int>{1, 0});
  CHECK(qpskDemap({0.4, -0.1}) == std::pair<int, int>{0, 1});
}

TEST_CASE("channel matrix reproduces the physical data frame on-grid") {
  const OtfsConfig cfg = smallConfig();
  const PathSet paths = onGridPaths(cfg, 3, 11);
  const DdaChannel h = ddaChannel(paths, cfg);
  const GridDims dims = cfg.dims();

  Rng rng(12);
  VectorXcd x(dims.rowCount());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.qpsk();

  std::vector<VectorXcd> frames(cfg.n_tx, VectorXcd::Zero(cfg.frameSamples()));
  frames[0] = otfsModulate(ddVectorToGrid(x, dims), cfg);
  const VectorXcd rx = applyChannel(frames, paths, cfg, 0.0, 0);
  const VectorXcd y_phys = ddGridToVector(otfsDemodulate(rx, cfg));

  const MatrixXcd h_mat = ddChannelMatrix(h, cfg, 0);
  const VectorXcd y_model = h_mat * x;
  CHECK((y_phys - y_model).norm() / y_phys.norm() < 1e-6);
}

TEST_CASE("channel matrix rejects mismatched grids") {
  const OtfsConfig cfg = smallConfig();
  OtfsConfig other = cfg;
  other.n_delay = 8;
  const DdaChannel h(other.dims());
  CHECK_THROWS(ddChannelMatrix(h, cfg, 0));
}

TEST_CASE("mmse equalizer solves the regularized normal equations") {
  Rng rng(21);
  const int m = 24;
  MatrixXcd h(m, m);
  VectorXcd y(m);
  for (int i = 0; i < m; ++i) {
    y[i] = rng.complexGaussian(1.0);
    for (int j = 0; j < m; ++j) h(i, j) = rng.complexGaussian(1.0);
  }
  const double nv = 0.3;
  const VectorXcd x = mmseEqualize(h, y, nv);
  MatrixXcd gram = h.adjoint() * h;
  gram.diagonal().array() += nv;
  CHECK((gram * x - h.adjoint() * y).norm() / y.norm() < 1e-10);

  // identity channel, vanishing noise: the equalizer passes y through
  const VectorXcd pass = mmseEqualize(MatrixXcd::Identity(m, m), y, 0.0);
  CHECK((pass - y).norm() < 1e-12 * y.norm());
  // strong regularization shrinks the solution
  CHECK(mmseEqualize(MatrixXcd::Identity(m, m), y, 10.0).norm() < y.norm());
  CHECK_THROWS(mmseEqualize(h, VectorXcd::Zero(m + 1), nv));
}

TEST_CASE("perfect channel knowledge gives error-free detection at high snr") {
  const OtfsConfig cfg = smallConfig();
  const PathSet paths = onGridPaths(cfg, 3, 31);
  const DdaChannel h = ddaChannel(paths, cfg);
  const BerResult res = berTrial(h, paths, cfg, 35.0, 32, 33);
  CHECK(res.bits == 2 * cfg.dims().rowCount());
  CHECK(res.bit_errors == 0);
  CHECK(res.ber == 0.0);
}

TEST_CASE("a zero channel estimate gives chance-level detection") {
  const OtfsConfig cfg = smallConfig();
  const PathSet paths = onGridPaths(cfg, 3, 41);
  const DdaChannel zero(cfg.dims());
  const BerResult res = berTrial(zero, paths, cfg, 20.0, 42, 43);
  CHECK(res.ber > 0.35);
  CHECK(res.ber < 0.65);
}

TEST_CASE("trials with identical seeds are reproducible and paired") {
  const OtfsConfig cfg = smallConfig();
  const PathSet paths = onGridPaths(cfg, 2, 51);
  const DdaChannel h = ddaChannel(paths, cfg);
  const BerResult a = berTrial(h, paths, cfg, 4.0, 52, 53);
  const BerResult b = berTrial(h, paths, cfg, 4.0, 52, 53);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.ber == b.ber);
  // the same frame equalized with a degraded estimate cannot beat the
  // perfect-knowledge error count by construction of the pairing
  DdaChannel rough = h;
  rough.flat() *= 0.2;
  const BerResult c = berTrial(rough, paths, cfg, 4.0, 52, 53);
  CHECK(c.bits == a.bits);
}

TEST_CASE("noiseless trials are insensitive to the noise seed") {
  const OtfsConfig cfg = smallConfig();
  const PathSet paths = onGridPaths(cfg, 2, 61);
  const DdaChannel h = ddaChannel(paths, cfg);
  const double inf = std::numeric_limits<double>::infinity();
  const BerResult a = berTrial(h, paths, cfg, inf, 62, 1);
  const BerResult b = berTrial(h, paths, cfg, inf, 62, 2);
  CHECK(a.bit_errors == b.bit_errors);
  CHECK(a.bit_errors == 0);
}
