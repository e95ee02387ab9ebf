// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jspl/dft.hpp"
#include "jspl/otfs.hpp"
#include "jspl/pilot.hpp"
#include "jspl/rng.hpp"

using namespace jspl;

namespace {

MatrixXcd randomGrid(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXcd x(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) x(i, j) = rng.complexGaussian(1.0);
  return x;
}

}  // namespace

TEST_CASE("dft matrices are unitary and mutually inverse") {
  for (int n : {2, 5, 16, 32}) {
    const MatrixXcd& f = dftMatrix(n);
    const MatrixXcd& fi = idftMatrix(n);
    CHECK((f * f.adjoint() - MatrixXcd::Identity(n, n)).norm() < 1e-12);
    CHECK((f * fi - MatrixXcd::Identity(n, n)).norm() < 1e-12);
    CHECK((fi - f.adjoint()).norm() == 0.0);
  }
}

TEST_CASE("dft matrix entry matches the exponential definition") {
  const int n = 8;
  const MatrixXcd& f = dftMatrix(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Complex ref =
          std::exp(Complex(0.0, -2.0 * kPi * a * b / n)) / std::sqrt(double(n));
      CHECK(std::abs(f(a, b) - ref) < 1e-14);
    }
}

TEST_CASE("doppler layout rotations are mutual inverses") {
  const MatrixXcd x = randomGrid(4, 8, 11);
  CHECK((dopplerDftToNatural(dopplerNaturalToDft(x)) - x).norm() < 1e-15);
  CHECK((dopplerNaturalToDft(dopplerDftToNatural(x)) - x).norm() < 1e-15);
}

TEST_CASE("isfft and sfft are unitary inverses") {
  const MatrixXcd x = randomGrid(16, 8, 3);
  const MatrixXcd tf = isfft(x);
  CHECK(std::abs(tf.norm() - x.norm()) < 1e-12);
  CHECK((sfft(tf) - x).norm() / x.norm() < 1e-13);
}

TEST_CASE("modulate then demodulate is the identity") {
  OtfsConfig cfg;
  cfg.n_tx = 2;
  const MatrixXcd x = randomGrid(cfg.n_delay, cfg.n_doppler, 7);
  const VectorXcd tx = otfsModulate(x, cfg);
  CHECK(tx.size() == cfg.frameSamples());
  const MatrixXcd back = otfsDemodulate(tx, cfg);
  CHECK((back - x).norm() / x.norm() < 1e-12);
}

TEST_CASE("cyclic prefix repeats the symbol tail") {
  OtfsConfig cfg;
  const MatrixXcd x = randomGrid(cfg.n_delay, cfg.n_doppler, 9);
  const VectorXcd tx = otfsModulate(x, cfg);
  const int sps = cfg.samplesPerSymbol();
  for (int sym = 0; sym < cfg.n_doppler; ++sym) {
    const int base = sym * sps;
    for (int i = 0; i < cfg.n_cp; ++i)
      CHECK(std::abs(tx[base + i] - tx[base + cfg.n_cp + cfg.n_delay - cfg.n_cp + i]) <
            1e-14);
  }
}

TEST_CASE("reciprocal tx and rx windows cancel") {
  OtfsConfig cfg;
  cfg.n_delay = 16;
  cfg.n_doppler = 8;
  cfg.n_cp = 4;
  Rng rng(5);
  VectorXcd w(cfg.n_delay);
  for (int i = 0; i < cfg.n_delay; ++i)
    w[i] = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * kPi));
  const VectorXcd winv = w.cwiseInverse();
  const MatrixXcd x = randomGrid(cfg.n_delay, cfg.n_doppler, 6);
  const MatrixXcd back = otfsDemodulate(otfsModulate(x, cfg, w), cfg, winv);
  CHECK((back - x).norm() / x.norm() < 1e-11);
}

TEST_CASE("grid vector serialization round-trips in row order") {
  OtfsConfig cfg;
  cfg.n_delay = 4;
  cfg.n_doppler = 4;
  cfg.n_cp = 2;
  const GridDims dims = cfg.dims();
  const MatrixXcd x = randomGrid(4, 4, 13);
  const VectorXcd v = ddGridToVector(x);
  REQUIRE(v.size() == dims.rowCount());
  for (int l = 0; l < 4; ++l)
    for (int k = -2; k < 2; ++k)
      CHECK(v[ddRowIndex(dims, l, k)] == x(l, k + 2));
  CHECK((ddVectorToGrid(v, dims) - x).norm() == 0.0);
}

TEST_CASE("config validation rejects bad geometry") {
  OtfsConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  OtfsConfig odd = cfg;
  odd.n_doppler = 7;
  CHECK_THROWS(odd.validate());
  OtfsConfig neg = cfg;
  neg.n_cp = -1;
  CHECK_THROWS(neg.validate());
  OtfsConfig zerof = cfg;
  zerof.subcarrier_spacing = 0.0;
  CHECK_THROWS(zerof.validate());
}

TEST_CASE("pilot pattern is a centered rectangle of the requested size") {
  OtfsConfig cfg;
  const double overhead = 0.05;
  const PilotPattern p = makePilotPattern(cfg, overhead, 77);
  const int want =
      static_cast<int>(std::ceil(overhead * cfg.n_delay * cfg.n_doppler));
  CHECK(p.count() == want);
  CHECK(p.overhead ==
        doctest::Approx(double(want) / (cfg.n_delay * cfg.n_doppler)).epsilon(1e-12));
  CHECK(p.symbols.rows() == want);
  CHECK(p.symbols.cols() == cfg.n_tx);
  CHECK_NOTHROW(p.validate(cfg));

  // contiguous: the occupied cells form one row-major run inside a rectangle
  int min_l = cfg.n_delay, max_l = -1, min_k = cfg.n_doppler, max_k = -10 * cfg.n_doppler;
  for (auto [l, k] : p.positions) {
    min_l = std::min(min_l, l);
    max_l = std::max(max_l, l);
    min_k = std::min(min_k, k);
    max_k = std::max(max_k, k);
  }
  const int width = max_k - min_k + 1;
  CHECK((max_l - min_l + 1) * width >= p.count());
  // centered: the bounding box midpoint sits within one cell of the grid center
  CHECK(std::abs((min_l + max_l + 1) - cfg.n_delay) <= width + 1);
  CHECK(std::abs(min_k + max_k + 1) <= 2);

  for (int i = 0; i < p.count(); ++i)
    for (int q = 0; q < cfg.n_tx; ++q)
      CHECK(std::abs(std::abs(p.symbols(i, q)) - 1.0) < 1e-12);
}

TEST_CASE("pilot symbolAt returns zero off the pattern") {
  OtfsConfig cfg;
  cfg.n_delay = 8;
  cfg.n_doppler = 8;
  cfg.n_cp = 2;
  cfg.n_tx = 2;
  const PilotPattern p = makePilotPattern(cfg, 0.1, 3);
  int hits = 0;
  for (int l = 0; l < 8; ++l)
    for (int k = -4; k < 4; ++k) {
      const Complex v = p.symbolAt(l, k, 1);
      if (v != Complex{0.0, 0.0}) ++hits;
    }
  CHECK(hits == p.count());
  const MatrixXcd g = p.grid(cfg, 1);
  int grid_hits = 0;
  for (int l = 0; l < 8; ++l)
    for (int k = -4; k < 4; ++k)
      if (g(l, k + 4) != Complex{0.0, 0.0}) ++grid_hits;
  CHECK(grid_hits == p.count());
}

TEST_CASE("pilot pattern is deterministic in the seed") {
  OtfsConfig cfg;
  const PilotPattern a = makePilotPattern(cfg, 0.2, 9);
  const PilotPattern b = makePilotPattern(cfg, 0.2, 9);
  const PilotPattern c = makePilotPattern(cfg, 0.2, 10);
  CHECK(a.positions == b.positions);
  CHECK((a.symbols - b.symbols).norm() == 0.0);
  CHECK((a.symbols - c.symbols).norm() > 0.0);
}

TEST_CASE("pilot overhead bounds are enforced") {
  OtfsConfig cfg;
  CHECK_THROWS(makePilotPattern(cfg, 0.0, 1));
  CHECK_THROWS(makePilotPattern(cfg, -0.1, 1));
  CHECK_THROWS(makePilotPattern(cfg, 1.5, 1));
  CHECK_NOTHROW(makePilotPattern(cfg, 1.0, 1));
}
