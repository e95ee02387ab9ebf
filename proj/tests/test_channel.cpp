// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <vector>

#include "jspl/channel.hpp"
#include "jspl/rng.hpp"

using namespace jspl;

namespace {

// Literal transcription of the sampled-path tensor response, kept separate
// from the library's implementation: gain * e^{j 2 pi nu T_s}
// * G(nu Nk T - k, Nk) * G(Nt psi - r, Nt) at the path's delay row, where
// G(d, n) = sin(pi d)/sin(pi d / n) * e^{j pi d (n-1)/n}.
Complex pointOracle(const Path& p, const OtfsConfig& cfg, int l, int k, int r) {
  if (l != p.delayTap(cfg)) return {0.0, 0.0};
  auto g = [](double d, int n) -> Complex {
    const double num = std::sin(kPi * d);
    const double den = std::sin(kPi * d / n);
    double ratio;
    if (std::abs(den) < 1e-9) {
      const long m = std::lround(d / n);
      ratio = n * ((m * (n + 1)) % 2 == 0 ? 1.0 : -1.0);
    } else {
      ratio = num / den;
    }
    return ratio * std::exp(Complex(0.0, kPi * d * (n - 1) / n));
  };
  const double dk = p.doppler_hz * cfg.n_doppler * cfg.symbolDuration() - k;
  const double dr = cfg.n_tx * p.aod_sin - r;
  return p.gain * std::exp(Complex(0.0, 2.0 * kPi * p.doppler_hz * cfg.samplePeriod())) *
         g(dk, cfg.n_doppler) * g(dr, cfg.n_tx);
}

}  // namespace

TEST_CASE("dirichlet ratio matches the sine quotient away from poles") {
  for (int n : {4, 7, 16}) {
    Rng rng(n);
    for (int t = 0; t < 200; ++t) {
      const double d = rng.uniform(-2.0 * n, 2.0 * n);
      const double den = std::sin(kPi * d / n);
      if (std::abs(den) < 1e-6) continue;
      CHECK(dirichletRatio(d, n) == doctest::Approx(std::sin(kPi * d) / den).epsilon(1e-10));
    }
  }
}

TEST_CASE("dirichlet ratio continuous extension at multiples of n") {
  for (int n : {4, 5, 16}) {
    for (int m : {-2, -1, 0, 1, 2}) {
      const double expect = n * ((m * (n + 1)) % 2 == 0 ? 1.0 : -1.0);
      CHECK(dirichletRatio(double(m) * n, n) == doctest::Approx(expect).epsilon(1e-12));
      // approach the pole from both sides
      CHECK(dirichletRatio(double(m) * n + 1e-9, n) == doctest::Approx(expect).epsilon(1e-6));
      CHECK(dirichletRatio(double(m) * n - 1e-9, n) == doctest::Approx(expect).epsilon(1e-6));
    }
  }
}

TEST_CASE("dirichlet kernel is the ratio with the linear phase attached") {
  const int n = 8;
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const double d = rng.uniform(-10.0, 10.0);
    const Complex want =
        dirichletRatio(d, n) * std::exp(Complex(0.0, kPi * d * (n - 1) / n));
    CHECK(std::abs(dirichletKernel(d, n) - want) < 1e-10);
  }
}

TEST_CASE("point response matches the scalar oracle for random paths") {
  OtfsConfig cfg;
  cfg.n_delay = 16;
  cfg.n_doppler = 8;
  cfg.n_cp = 4;
  cfg.n_tx = 4;
  Rng rng(17);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    Path p;
    p.gain = rng.complexGaussian(1.0);
    p.delay_s = rng.uniformInt(0, cfg.n_cp) * cfg.samplePeriod();
    p.doppler_hz = rng.uniform(-2.0, 2.0) * cfg.dopplerResolution();
    p.aod_sin = rng.uniform(-0.5, 0.5);
    for (int k = -cfg.n_doppler / 2; k < cfg.n_doppler / 2; ++k)
      for (int r = -cfg.n_tx / 2; r < cfg.n_tx / 2; ++r) {
        const Complex a = ddaPointResponse(p, cfg, p.delayTap(cfg), k, r);
        const Complex b = pointOracle(p, cfg, p.delayTap(cfg), k, r);
        worst = std::max(worst, std::abs(a - b));
      }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("on-grid path peaks at its lattice point with amplitude nk*nt") {
  OtfsConfig cfg;
  cfg.n_delay = 16;
  cfg.n_doppler = 8;
  cfg.n_cp = 4;
  cfg.n_tx = 4;
  Path p;
  p.gain = Complex(0.8, -0.6);
  p.delay_s = 2 * cfg.samplePeriod();
  p.doppler_hz = -2.0 * cfg.dopplerResolution();
  p.aod_sin = 1.0 / cfg.n_tx;  // grid point r = 1
  PathSet ps;
  ps.paths.push_back(p);
  const DdaChannel h = ddaChannel(ps, cfg);
  double peak = 0.0;
  int pl = -1, pk = 0, pr = 0;
  for (int l = 0; l < cfg.n_delay; ++l)
    for (int k = -cfg.n_doppler / 2; k < cfg.n_doppler / 2; ++k)
      for (int r = -cfg.n_tx / 2; r < cfg.n_tx / 2; ++r)
        if (std::abs(h.at(l, k, r)) > peak) {
          peak = std::abs(h.at(l, k, r));
          pl = l;
          pk = k;
          pr = r;
        }
  CHECK(pl == 2);
  CHECK(pk == -2);
  CHECK(pr == 1);
  CHECK(peak == doctest::Approx(std::abs(p.gain) * cfg.n_doppler * cfg.n_tx).epsilon(1e-10));
  // off-lattice Doppler/angle bins of an on-grid path carry nothing
  CHECK(std::abs(h.at(2, 1, 1)) < 1e-10);
  CHECK(std::abs(h.at(2, -2, 0)) < 1e-10);
}

TEST_CASE("sampled paths respect the documented ranges") {
  OtfsConfig cfg;
  PathSamplingOptions opts;
  opts.n_paths = 6;
  opts.max_speed_mps = 100.0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const PathSet ps = samplePaths(cfg, opts, seed);
    REQUIRE(ps.paths.size() == 6);
    CHECK_NOTHROW(validatePaths(ps, cfg));
    std::set<int> taps;
    const double nu_bound = opts.max_speed_mps * cfg.carrier_freq / 299792458.0;
    for (const Path& p : ps.paths) {
      const int tap = p.delayTap(cfg);
      CHECK(tap >= 0);
      CHECK(tap < int(cfg.n_delay * opts.overdelay_fraction));
      CHECK(std::abs(p.delay_s - tap * cfg.samplePeriod()) < 1e-18);
      CHECK(taps.insert(tap).second);  // distinct integer taps
      CHECK(std::abs(p.doppler_hz) <= nu_bound * (1.0 + 1e-12));
      CHECK(p.aod_sin >= -0.5);
      CHECK(p.aod_sin < 0.5);
      CHECK(std::abs(p.gain) > 0.0);
    }
  }
}

TEST_CASE("path sampling is deterministic and seed-sensitive") {
  OtfsConfig cfg;
  PathSamplingOptions opts;
  const PathSet a = samplePaths(cfg, opts, 21);
  const PathSet b = samplePaths(cfg, opts, 21);
  const PathSet c = samplePaths(cfg, opts, 22);
  REQUIRE(a.paths.size() == b.paths.size());
  for (std::size_t i = 0; i < a.paths.size(); ++i) {
    CHECK(a.paths[i].gain == b.paths[i].gain);
    CHECK(a.paths[i].delay_s == b.paths[i].delay_s);
    CHECK(a.paths[i].doppler_hz == b.paths[i].doppler_hz);
    CHECK(a.paths[i].aod_sin == b.paths[i].aod_sin);
  }
  bool differs = false;
  for (std::size_t i = 0; i < std::min(a.paths.size(), c.paths.size()); ++i)
    if (a.paths[i].gain != c.paths[i].gain) differs = true;
  CHECK(differs);
}

TEST_CASE("on-grid sampling snaps doppler and angle to lattice points") {
  OtfsConfig cfg;
  PathSamplingOptions opts;
  opts.on_grid = true;
  opts.max_speed_mps = 200.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PathSet ps = samplePaths(cfg, opts, seed);
    for (const Path& p : ps.paths) {
      const double dk = p.doppler_hz / cfg.dopplerResolution();
      const double dr = cfg.n_tx * p.aod_sin;
      CHECK(std::abs(dk - std::lround(dk)) < 1e-9);
      CHECK(std::abs(dr - std::lround(dr)) < 1e-9);
    }
  }
}

TEST_CASE("clustered angles stay within a narrow burst") {
  OtfsConfig cfg;
  PathSamplingOptions opts;
  opts.cluster_aod = true;
  opts.n_paths = 6;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PathSet ps = samplePaths(cfg, opts, seed);
    // circular spread: 1 minus the widest empty arc of the wrapped interval
    std::vector<double> a;
    for (const Path& p : ps.paths) a.push_back(p.aod_sin);
    std::sort(a.begin(), a.end());
    double max_gap = a.front() + 1.0 - a.back();
    for (std::size_t i = 1; i < a.size(); ++i) max_gap = std::max(max_gap, a[i] - a[i - 1]);
    CHECK(1.0 - max_gap < 0.25);
  }
}

TEST_CASE("tensor is additive over paths") {
  OtfsConfig cfg;
  cfg.n_delay = 8;
  cfg.n_doppler = 4;
  cfg.n_cp = 2;
  cfg.n_tx = 4;
  PathSamplingOptions opts;
  opts.n_paths = 2;
  const PathSet both = samplePaths(cfg, opts, 5);
  PathSet first, second;
  first.paths.push_back(both.paths[0]);
  second.paths.push_back(both.paths[1]);
  const DdaChannel h01 = ddaChannel(both, cfg);
  const DdaChannel h0 = ddaChannel(first, cfg);
  const DdaChannel h1 = ddaChannel(second, cfg);
  CHECK((h01.flat() - h0.flat() - h1.flat()).norm() / h01.flat().norm() < 1e-13);
}

TEST_CASE("out-of-range paths are rejected") {
  OtfsConfig cfg;
  PathSet ps;
  Path p;
  p.gain = Complex(1.0, 0.0);
  p.delay_s = cfg.n_delay * cfg.samplePeriod();  // off the delay grid
  ps.paths.push_back(p);
  CHECK_THROWS(validatePaths(ps, cfg));
  ps.paths[0].delay_s = 0.0;
  ps.paths[0].doppler_hz = cfg.dopplerResolution() * cfg.n_doppler;  // off the band
  CHECK_THROWS(validatePaths(ps, cfg));
  ps.paths[0].doppler_hz = 0.0;
  ps.paths[0].aod_sin = 0.75;
  CHECK_THROWS(validatePaths(ps, cfg));
  ps.paths[0].aod_sin = 0.0;
  ps.paths[0].delay_s = 0.5 * cfg.samplePeriod();  // fractional tap
  CHECK_THROWS(validatePaths(ps, cfg));
}

TEST_CASE("path set json round-trips exactly") {
  OtfsConfig cfg;
  PathSamplingOptions opts;
  opts.n_paths = 5;
  const PathSet ps = samplePaths(cfg, opts, 31);
  const std::string text = pathSetToJson(ps, cfg);
  const PathSet back = pathSetFromJson(text, cfg);
  REQUIRE(back.paths.size() == ps.paths.size());
  for (std::size_t i = 0; i < ps.paths.size(); ++i) {
    CHECK(std::abs(back.paths[i].gain - ps.paths[i].gain) < 1e-15);
    CHECK(back.paths[i].delayTap(cfg) == ps.paths[i].delayTap(cfg));
    CHECK(back.paths[i].doppler_hz == doctest::Approx(ps.paths[i].doppler_hz).epsilon(1e-15));
    CHECK(back.paths[i].aod_sin == doctest::Approx(ps.paths[i].aod_sin).epsilon(1e-15));
  }

  const std::string file = (std::filesystem::temp_directory_path() / "paths_rt.json").string();
  savePathSet(ps, cfg, file);
  const PathSet loaded = loadPathSet(file, cfg);
  CHECK(loaded.paths.size() == ps.paths.size());
  std::filesystem::remove(file);
}

TEST_CASE("time-domain propagation adds calibrated noise") {
  OtfsConfig cfg;
  cfg.n_tx = 2;
  PathSamplingOptions opts;
  opts.n_paths = 3;
  const PathSet ps = samplePaths(cfg, opts, 8);
  Rng rng(4);
  std::vector<VectorXcd> frames(cfg.n_tx);
  for (auto& f : frames) {
    f.resize(cfg.frameSamples());
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] = rng.complexGaussian(1.0);
  }
  const VectorXcd clean = applyChannel(frames, ps, cfg, 0.0, 0);
  const double var = 0.25;
  double acc = 0.0;
  const int reps = 50;
  for (int t = 0; t < reps; ++t) {
    const VectorXcd noisy = applyChannel(frames, ps, cfg, var, 1000 + t);
    acc += (noisy - clean).squaredNorm() / clean.size();
  }
  CHECK(acc / reps == doctest::Approx(var).epsilon(0.05));
}
