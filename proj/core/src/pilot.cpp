// SPDX-License-Identifier: Apache-2.0
#include "jspl/pilot.hpp"

#include <cmath>
#include <set>

#include "jspl/rng.hpp"

namespace jspl {

MatrixXcd PilotPattern::grid(const OtfsConfig& cfg, int q) const {
  MatrixXcd x = MatrixXcd::Zero(cfg.n_delay, cfg.n_doppler);
  for (int i = 0; i < count(); ++i) {
    const auto [l, k] = positions[i];
    x(l, k + cfg.n_doppler / 2) = symbols(i, q);
  }
  return x;
}

Complex PilotPattern::symbolAt(int l, int k, int q) const {
  for (int i = 0; i < count(); ++i)
    if (positions[i].first == l && positions[i].second == k) return symbols(i, q);
  return {0.0, 0.0};
}

void PilotPattern::validate(const OtfsConfig& cfg) const {
  if (positions.empty()) throw std::invalid_argument("PilotPattern: empty");
  if (symbols.rows() != count() || symbols.cols() != cfg.n_tx)
    throw std::invalid_argument("PilotPattern: symbol matrix shape mismatch");
  std::set<std::pair<int, int>> seen;
  for (const auto& [l, k] : positions) {
    if (l < 0 || l >= cfg.n_delay || k < -cfg.n_doppler / 2 || k >= cfg.n_doppler / 2)
      throw std::invalid_argument("PilotPattern: position out of range");
    if (!seen.insert({l, k}).second)
      throw std::invalid_argument("PilotPattern: duplicate position");
  }
  const double expect = static_cast<double>(count()) / (cfg.n_delay * cfg.n_doppler);
  if (std::abs(expect - overhead) > 1e-12)
    throw std::invalid_argument("PilotPattern: overhead does not match position count");
}

PilotPattern makePilotPattern(const OtfsConfig& cfg, double overhead, std::uint64_t seed) {
  cfg.validate();
  if (!(overhead > 0.0) || overhead > 1.0)
    throw std::invalid_argument("makePilotPattern: overhead must be in (0, 1]");

  const int total = cfg.n_delay * cfg.n_doppler;
  const int want = static_cast<int>(std::ceil(overhead * total));

  // Smallest centered rectangle holding `want` cells, near the grid's
  // aspect ratio; enumerate row-major and keep the first `want`.
  int w_k = std::min(cfg.n_doppler,
                     std::max(1, static_cast<int>(std::ceil(
                                     std::sqrt(static_cast<double>(want) * cfg.n_doppler /
                                               cfg.n_delay)))));
  int w_l = (want + w_k - 1) / w_k;
  if (w_l > cfg.n_delay) {
    w_l = cfg.n_delay;
    w_k = (want + w_l - 1) / w_l;
  }
  const int l0 = (cfg.n_delay - w_l) / 2;
  const int c0 = (cfg.n_doppler - w_k) / 2;

  PilotPattern out;
  out.seed = seed;
  out.overhead = static_cast<double>(want) / total;
  for (int l = l0; l < l0 + w_l && out.count() < want; ++l)
    for (int c = c0; c < c0 + w_k && out.count() < want; ++c)
      out.positions.emplace_back(l, c - cfg.n_doppler / 2);

  Rng rng(seed);
  out.symbols.resize(out.count(), cfg.n_tx);
  for (int i = 0; i < out.count(); ++i)
    for (int q = 0; q < cfg.n_tx; ++q) out.symbols(i, q) = rng.qpsk();

  out.validate(cfg);
  return out;
}

}  // namespace jspl
