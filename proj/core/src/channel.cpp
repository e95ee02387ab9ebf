// SPDX-License-Identifier: Apache-2.0
#include "jspl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "jspl/rng.hpp"

namespace jspl {

int Path::delayTap(const OtfsConfig& cfg) const {
  return static_cast<int>(std::llround(delay_s / cfg.samplePeriod()));
}

void validatePaths(const PathSet& paths, const OtfsConfig& cfg) {
  const double ts = cfg.samplePeriod();
  std::vector<int> taps;
  for (const Path& p : paths.paths) {
    const double tap_f = p.delay_s / ts;
    const int tap = static_cast<int>(std::llround(tap_f));
    if (tap < 0 || std::abs(tap_f - tap) > 1e-9)
      throw std::invalid_argument("Path: delay must be a non-negative integer tap");
    if (tap >= cfg.n_delay) throw std::invalid_argument("Path: delay tap out of range");
    const double doppler_index = p.doppler_hz * cfg.n_doppler * cfg.symbolDuration();
    if (std::abs(doppler_index) >= cfg.n_doppler / 2.0)
      throw std::invalid_argument("Path: Doppler index out of range");
    if (p.aod_sin < -0.5 || p.aod_sin >= 0.5)
      throw std::invalid_argument("Path: aod_sin outside [-1/2, 1/2)");
    taps.push_back(tap);
  }
  std::sort(taps.begin(), taps.end());
  if (std::adjacent_find(taps.begin(), taps.end()) != taps.end())
    throw std::invalid_argument("PathSet: delay taps must be distinct");
}

PathSet samplePaths(const OtfsConfig& cfg, const PathSamplingOptions& options,
                    std::uint64_t seed) {
  cfg.validate();
  if (options.n_paths < 1) throw std::invalid_argument("samplePaths: n_paths must be >= 1");
  if (options.max_speed_mps < 0.0)
    throw std::invalid_argument("samplePaths: max_speed must be >= 0");
  const int tap_limit = static_cast<int>(cfg.n_delay * options.overdelay_fraction);
  if (options.n_paths > tap_limit)
    throw std::invalid_argument("samplePaths: more paths than distinct delay taps");

  Rng rng(seed);
  PathSet out;
  out.seed = seed;

  std::vector<int> taps(tap_limit);
  std::iota(taps.begin(), taps.end(), 0);
  for (int i = 0; i < options.n_paths; ++i) {
    const int j = rng.uniformInt(i, tap_limit - 1);
    std::swap(taps[i], taps[j]);
  }

  const double nu_max = options.max_speed_mps * cfg.carrier_freq / kSpeedOfLight;
  const double doppler_res = cfg.dopplerResolution();
  const double aod_center = rng.uniform(-0.5, 0.5);
  const int burst_len = std::max(1, static_cast<int>(std::lround(cfg.n_tx / 10.0)));
  const double aod_halfwidth = 0.5 * burst_len / cfg.n_tx;

  double total_power = 0.0;
  for (int i = 0; i < options.n_paths; ++i) {
    Path p;
    p.gain = rng.complexGaussian(1.0);
    total_power += std::norm(p.gain);
    p.delay_s = taps[i] * cfg.samplePeriod();

    double nu = nu_max * std::cos(rng.uniform(0.0, 2.0 * kPi));
    double aod;
    if (options.cluster_aod) {
      aod = aod_center + rng.uniform(-aod_halfwidth, aod_halfwidth);
      aod -= std::floor(aod + 0.5);  // wrap into [-1/2, 1/2)
    } else {
      aod = rng.uniform(-0.5, 0.5);
    }
    if (options.on_grid) {
      nu = std::lround(nu / doppler_res) * doppler_res;
      int r = static_cast<int>(std::lround(aod * cfg.n_tx));
      r = std::clamp(r, -cfg.n_tx / 2, cfg.n_tx / 2 - 1);
      aod = static_cast<double>(r) / cfg.n_tx;
    }
    p.doppler_hz = nu;
    p.aod_sin = aod;
    out.paths.push_back(p);
  }

  const double scale = total_power > 0.0 ? 1.0 / std::sqrt(total_power) : 1.0;
  for (Path& p : out.paths) p.gain *= scale;

  validatePaths(out, cfg);
  return out;
}

DdaChannel::DdaChannel(const GridDims& dims, VectorXcd flat) : dims_(dims), data_(std::move(flat)) {
  if (data_.size() != dims_.colCount())
    throw std::invalid_argument("DdaChannel: flat vector length does not match dims");
}

double dirichletRatio(double d, int n) {
  const double m = std::round(d / n);
  if (std::abs(d - m * n) < 1e-9) {
    const double sign = (static_cast<long long>(m) * (n + 1)) % 2 == 0 ? 1.0 : -1.0;
    return sign * n;
  }
  return std::sin(kPi * d) / std::sin(kPi * d / n);
}

Complex dirichletKernel(double d, int n) {
  return dirichletRatio(d, n) * unitPhasor(kPi * d * (n - 1) / n);
}

Complex ddaPointResponse(const Path& path, const OtfsConfig& cfg, int l, int k, int r) {
  if (path.delayTap(cfg) != l) return {0.0, 0.0};
  const double dk = path.doppler_hz * cfg.n_doppler * cfg.symbolDuration() - k;
  const double dr = cfg.n_tx * path.aod_sin - r;
  return path.gain * unitPhasor(2.0 * kPi * path.doppler_hz * cfg.samplePeriod()) *
         dirichletKernel(dk, cfg.n_doppler) * dirichletKernel(dr, cfg.n_tx);
}

DdaChannel ddaChannel(const PathSet& paths, const OtfsConfig& cfg) {
  cfg.validate();
  validatePaths(paths, cfg);
  const GridDims dims = cfg.dims();
  DdaChannel h(dims);
  VectorXcd doppler(cfg.n_doppler), angle(cfg.n_tx);
  for (const Path& p : paths.paths) {
    const int l = p.delayTap(cfg);
    const Complex lead =
        p.gain * unitPhasor(2.0 * kPi * p.doppler_hz * cfg.samplePeriod());
    for (int k = -cfg.n_doppler / 2; k < cfg.n_doppler / 2; ++k) {
      const double dk = p.doppler_hz * cfg.n_doppler * cfg.symbolDuration() - k;
      doppler[k + cfg.n_doppler / 2] = dirichletKernel(dk, cfg.n_doppler);
    }
    for (int r = -cfg.n_tx / 2; r < cfg.n_tx / 2; ++r) {
      const double dr = cfg.n_tx * p.aod_sin - r;
      angle[r + cfg.n_tx / 2] = dirichletKernel(dr, cfg.n_tx);
    }
    for (int r = -cfg.n_tx / 2; r < cfg.n_tx / 2; ++r)
      for (int k = -cfg.n_doppler / 2; k < cfg.n_doppler / 2; ++k)
        h.at(l, k, r) += lead * doppler[k + cfg.n_doppler / 2] * angle[r + cfg.n_tx / 2];
  }
  return h;
}

VectorXcd applyChannel(const std::vector<VectorXcd>& signals, const PathSet& paths,
                       const OtfsConfig& cfg, double noise_var, std::uint64_t noise_seed) {
  cfg.validate();
  validatePaths(paths, cfg);
  if (static_cast<int>(signals.size()) != cfg.n_tx)
    throw std::invalid_argument("applyChannel: need one signal per antenna");
  const Eigen::Index frame = cfg.frameSamples();
  for (const VectorXcd& s : signals)
    if (s.size() != frame) throw std::invalid_argument("applyChannel: bad frame length");
  for (const Path& p : paths.paths)
    if (p.delayTap(cfg) > cfg.n_cp)
      throw std::invalid_argument("applyChannel: delay exceeds cyclic prefix");

  const int sym = cfg.samplesPerSymbol();
  const double ts = cfg.samplePeriod();
  // Doppler phase is referenced to the last CP sample of the first symbol,
  // which is where the discrete tensor model puts its per-sample phase origin.
  const int kappa0 = cfg.n_cp - 1;

  VectorXcd r = VectorXcd::Zero(frame);
  for (const Path& p : paths.paths) {
    const int tap = p.delayTap(cfg);
    for (int q = 0; q < cfg.n_tx; ++q) {
      const Complex spatial = p.gain * unitPhasor(2.0 * kPi * q * p.aod_sin);
      if (spatial == Complex{0.0, 0.0}) continue;
      const VectorXcd& s = signals[q];
      for (int n = 0; n < cfg.n_doppler; ++n) {
        const Eigen::Index base = static_cast<Eigen::Index>(n) * sym;
        for (int pos = 0; pos < sym; ++pos) {
          const int src = (pos - tap + sym) % sym;
          const int kappa = static_cast<int>(base) + pos;
          r[base + pos] +=
              spatial * unitPhasor(2.0 * kPi * p.doppler_hz * (kappa - kappa0) * ts) *
              s[base + src];
        }
      }
    }
  }

  if (noise_var > 0.0) {
    Rng rng(noise_seed);
    for (Eigen::Index i = 0; i < frame; ++i) r[i] += rng.complexGaussian(noise_var);
  }
  return r;
}

std::string pathSetToJson(const PathSet& paths, const OtfsConfig& cfg) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["seed"] = paths.seed;
  j["paths"] = nlohmann::json::array();
  for (const Path& p : paths.paths) {
    j["paths"].push_back({{"gain_re", p.gain.real()},
                          {"gain_im", p.gain.imag()},
                          {"delay_taps", p.delayTap(cfg)},
                          {"doppler_hz", p.doppler_hz},
                          {"aod_sin", p.aod_sin}});
  }
  return j.dump(2);
}

PathSet pathSetFromJson(const std::string& text, const OtfsConfig& cfg) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("pathSetFromJson: unsupported schema_version");
  PathSet out;
  out.seed = j.value("seed", 0ULL);
  for (const auto& jp : j.at("paths")) {
    Path p;
    p.gain = {jp.at("gain_re").get<double>(), jp.at("gain_im").get<double>()};
    p.delay_s = jp.at("delay_taps").get<int>() * cfg.samplePeriod();
    p.doppler_hz = jp.at("doppler_hz").get<double>();
    p.aod_sin = jp.at("aod_sin").get<double>();
    out.paths.push_back(p);
  }
  validatePaths(out, cfg);
  return out;
}

void savePathSet(const PathSet& paths, const OtfsConfig& cfg, const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("savePathSet: cannot open " + file);
  os << pathSetToJson(paths, cfg) << '\n';
}

PathSet loadPathSet(const std::string& file, const OtfsConfig& cfg) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("loadPathSet: cannot open " + file);
  std::stringstream ss;
  ss << is.rdbuf();
  return pathSetFromJson(ss.str(), cfg);
}

}  // namespace jspl
