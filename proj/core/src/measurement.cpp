// SPDX-License-Identifier: Apache-2.0
#include "jspl/measurement.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "jspl/otfs.hpp"

static_assert(std::endian::native == std::endian::little,
              "measurement container assumes a little-endian host");

namespace jspl {

namespace {

constexpr char kMagic[8] = {'O', 'J', 'M', 'M', '0', '0', '0', '1'};

void writeDoubles(std::ofstream& os, const double* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

void readDoubles(std::ifstream& is, double* p, std::size_t n) {
  is.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("measurement container: truncated payload");
}

}  // namespace

MeasurementModel observe(const PathSet& paths, std::shared_ptr<const DdOperator> op,
                         double snr_db, std::uint64_t noise_seed) {
  const OtfsConfig& cfg = op->config();
  const PilotPattern& pilots = op->pilots();

  std::vector<VectorXcd> frames(cfg.n_tx);
  for (int q = 0; q < cfg.n_tx; ++q) frames[q] = otfsModulate(pilots.grid(cfg, q), cfg);

  const VectorXcd clean = applyChannel(frames, paths, cfg, 0.0, 0);
  double noise_var = 0.0;
  if (std::isfinite(snr_db)) {
    const double rx_power = clean.squaredNorm() / static_cast<double>(clean.size());
    noise_var = rx_power * std::pow(10.0, -snr_db / 10.0);
  }
  const VectorXcd received = noise_var > 0.0
                                 ? applyChannel(frames, paths, cfg, noise_var, noise_seed)
                                 : clean;

  MeasurementModel model;
  model.y = ddGridToVector(otfsDemodulate(received, cfg));
  model.op = std::move(op);
  model.noise_var = noise_var;
  model.snr_db = snr_db;
  model.noise_seed = noise_seed;
  return model;
}

MeasurementModel observe(const PathSet& paths, const PilotPattern& pilots,
                         const OtfsConfig& cfg, double snr_db, std::uint64_t noise_seed,
                         Eigen::Index max_dense_elements) {
  cfg.validate();
  pilots.validate(cfg);
  return observe(paths, std::make_shared<DdOperator>(pilots, cfg, max_dense_elements),
                 snr_db, noise_seed);
}

void saveMeasurement(const MeasurementModel& model, const std::string& file) {
  const OtfsConfig& cfg = model.config();
  const PilotPattern& pilots = model.op->pilots();

  nlohmann::json header;
  header["schema_version"] = 1;
  header["n_delay"] = cfg.n_delay;
  header["n_doppler"] = cfg.n_doppler;
  header["n_cp"] = cfg.n_cp;
  header["n_tx"] = cfg.n_tx;
  header["subcarrier_spacing"] = cfg.subcarrier_spacing;
  header["carrier_freq"] = cfg.carrier_freq;
  header["noise_var"] = model.noise_var;
  header["snr_db"] = std::isfinite(model.snr_db) ? nlohmann::json(model.snr_db)
                                                 : nlohmann::json(nullptr);
  header["noise_seed"] = model.noise_seed;
  header["pilot_seed"] = pilots.seed;
  header["pilot_overhead"] = pilots.overhead;
  auto positions = nlohmann::json::array();
  for (const auto& [l, k] : pilots.positions) positions.push_back({l, k});
  header["pilot_positions"] = std::move(positions);
  header["payload"] = {{"y", model.y.size()},
                       {"pilot_symbols", pilots.symbols.rows() * pilots.symbols.cols()}};

  const std::string htext = header.dump();
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("saveMeasurement: cannot open " + file);
  os.write(kMagic, sizeof(kMagic));
  const std::uint64_t hlen = htext.size();
  os.write(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  os.write(htext.data(), static_cast<std::streamsize>(htext.size()));

  std::vector<double> buf;
  buf.reserve(2 * static_cast<std::size_t>(model.y.size()));
  for (Eigen::Index i = 0; i < model.y.size(); ++i) {
    buf.push_back(model.y[i].real());
    buf.push_back(model.y[i].imag());
  }
  for (Eigen::Index i = 0; i < pilots.symbols.rows(); ++i)
    for (Eigen::Index q = 0; q < pilots.symbols.cols(); ++q) {
      buf.push_back(pilots.symbols(i, q).real());
      buf.push_back(pilots.symbols(i, q).imag());
    }
  writeDoubles(os, buf.data(), buf.size());
  if (!os) throw std::runtime_error("saveMeasurement: write failed");
}

MeasurementModel loadMeasurement(const std::string& file, Eigen::Index max_dense_elements) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("loadMeasurement: cannot open " + file);
  char magic[sizeof(kMagic)];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw std::runtime_error("loadMeasurement: bad magic");
  std::uint64_t hlen = 0;
  is.read(reinterpret_cast<char*>(&hlen), sizeof(hlen));
  std::string htext(hlen, '\0');
  is.read(htext.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw std::runtime_error("loadMeasurement: truncated header");

  const nlohmann::json header = nlohmann::json::parse(htext);
  if (header.at("schema_version").get<int>() != 1)
    throw std::runtime_error("loadMeasurement: unsupported schema_version");

  OtfsConfig cfg;
  cfg.n_delay = header.at("n_delay").get<int>();
  cfg.n_doppler = header.at("n_doppler").get<int>();
  cfg.n_cp = header.at("n_cp").get<int>();
  cfg.n_tx = header.at("n_tx").get<int>();
  cfg.subcarrier_spacing = header.at("subcarrier_spacing").get<double>();
  cfg.carrier_freq = header.at("carrier_freq").get<double>();
  cfg.validate();

  PilotPattern pilots;
  pilots.seed = header.at("pilot_seed").get<std::uint64_t>();
  pilots.overhead = header.at("pilot_overhead").get<double>();
  for (const auto& jp : header.at("pilot_positions"))
    pilots.positions.emplace_back(jp.at(0).get<int>(), jp.at(1).get<int>());

  const Eigen::Index ny = header.at("payload").at("y").get<Eigen::Index>();
  const Eigen::Index nsym = header.at("payload").at("pilot_symbols").get<Eigen::Index>();
  if (ny != cfg.dims().rowCount() ||
      nsym != static_cast<Eigen::Index>(pilots.positions.size()) * cfg.n_tx)
    throw std::runtime_error("loadMeasurement: payload sizes inconsistent with header");

  std::vector<double> buf(2 * static_cast<std::size_t>(ny + nsym));
  readDoubles(is, buf.data(), buf.size());

  MeasurementModel model;
  model.y.resize(ny);
  std::size_t at = 0;
  for (Eigen::Index i = 0; i < ny; ++i, at += 2) model.y[i] = {buf[at], buf[at + 1]};
  pilots.symbols.resize(static_cast<Eigen::Index>(pilots.positions.size()), cfg.n_tx);
  for (Eigen::Index i = 0; i < pilots.symbols.rows(); ++i)
    for (Eigen::Index q = 0; q < cfg.n_tx; ++q, at += 2)
      pilots.symbols(i, q) = {buf[at], buf[at + 1]};

  model.noise_var = header.at("noise_var").get<double>();
  model.snr_db = header.at("snr_db").is_null()
                     ? std::numeric_limits<double>::infinity()
                     : header.at("snr_db").get<double>();
  model.noise_seed = header.at("noise_seed").get<std::uint64_t>();
  model.op = std::make_shared<DdOperator>(pilots, cfg, max_dense_elements);
  return model;
}

}  // namespace jspl
