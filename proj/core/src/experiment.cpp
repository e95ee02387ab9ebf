// SPDX-License-Identifier: Apache-2.0
#include "jspl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "jspl/equalizer.hpp"
#include "jspl/metrics.hpp"
#include "jspl/rng.hpp"

namespace jspl {

namespace {

// Seed stream tags; the sweep coordinates select independent child streams
// so every trial is reproducible in isolation.
constexpr std::uint64_t kChannelTag = 0xC1;
constexpr std::uint64_t kPilotTag = 0xB2;
constexpr std::uint64_t kNoiseTag = 0xA3;
constexpr std::uint64_t kDataTag = 0xD4;
constexpr std::uint64_t kDataNoiseTag = 0xE5;

OtfsConfig otfsFromJson(const nlohmann::json& j) {
  OtfsConfig cfg;
  cfg.n_delay = j.value("n_delay", cfg.n_delay);
  cfg.n_doppler = j.value("n_doppler", cfg.n_doppler);
  cfg.n_cp = j.value("n_cp", cfg.n_cp);
  cfg.n_tx = j.value("n_tx", cfg.n_tx);
  cfg.subcarrier_spacing = j.value("subcarrier_spacing", cfg.subcarrier_spacing);
  cfg.carrier_freq = j.value("carrier_freq", cfg.carrier_freq);
  cfg.validate();
  return cfg;
}

JsplConfig jsplFromJson(const nlohmann::json& j) {
  JsplConfig cfg;
  cfg.t_max = j.value("t_max", cfg.t_max);
  cfg.eps1 = j.value("eps1", cfg.eps1);
  cfg.eps2_delay = j.value("eps2_delay", cfg.eps2_delay);
  cfg.eps2_entry = j.value("eps2_entry", cfg.eps2_entry);
  cfg.damping = j.value("damping", cfg.damping);
  cfg.xi_self = j.value("xi_self", cfg.xi_self);
  cfg.xi_nb = j.value("xi_nb", cfg.xi_nb);
  cfg.neighbor_radius = j.value("neighbor_radius", cfg.neighbor_radius);
  cfg.lambda_init = j.value("lambda_init", cfg.lambda_init);
  cfg.mu_init = j.value("mu_init", cfg.mu_init);
  cfg.eta_init = j.value("eta_init", cfg.eta_init);
  cfg.lambda_floor = j.value("lambda_floor", cfg.lambda_floor);
  cfg.max_support = j.value("max_support", cfg.max_support);
  cfg.plain_lambda_update = j.value("plain_lambda_update", cfg.plain_lambda_update);
  cfg.validate();
  return cfg;
}

OmpConfig ompFromJson(const nlohmann::json& j) {
  OmpConfig cfg;
  cfg.max_atoms = j.value("max_atoms", cfg.max_atoms);
  cfg.residual_tol = j.value("residual_tol", cfg.residual_tol);
  if (j.contains("block_dims")) {
    const auto& b = j.at("block_dims");
    if (!b.is_array() || b.size() != 3)
      throw std::runtime_error("estimator config: block_dims must have 3 entries");
    for (int i = 0; i < 3; ++i) cfg.block_dims[i] = b[i].get<int>();
  }
  cfg.validate();
  return cfg;
}

std::string fmtDouble(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

bool rowLess(const TrialResult& a, const TrialResult& b) {
  return std::tie(a.kind, a.estimator, a.snr_db, a.speed_mps, a.overhead, a.trial) <
         std::tie(b.kind, b.estimator, b.snr_db, b.speed_mps, b.overhead, b.trial);
}

void parallelFor(int n_items, int n_threads, const std::function<void(int)>& fn) {
  if (n_threads <= 1 || n_items <= 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(n_threads, n_items);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& th : pool) th.join();
}

struct EstimateOutcome {
  DdaChannel estimate;
  std::vector<Eigen::Index> support;
  std::string status = "ok";
  double runtime_s = 0.0;
};

EstimateOutcome runEstimator(const EstimatorSpec& est, const MeasurementModel& model) {
  EstimateOutcome out;
  const auto start = std::chrono::steady_clock::now();
  if (est.type == "jspl") {
    JsplResult res = runJspl(model, est.jspl);
    out.estimate = std::move(res.estimate);
    out.support = std::move(res.support.flat);
    out.status = res.diagnostics.status;
  } else if (est.type == "omp") {
    SparseRecoveryResult res = omp(model, est.omp);
    out.estimate = std::move(res.estimate);
    out.support = std::move(res.support);
  } else if (est.type == "somp3d") {
    SparseRecoveryResult res = somp3d(model, est.omp);
    out.estimate = std::move(res.estimate);
    out.support = std::move(res.support);
  } else {
    throw std::runtime_error("unknown estimator type: " + est.type);
  }
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void writeOutputs(const std::vector<TrialResult>& rows, const std::string& out_dir) {
  if (out_dir.empty()) return;
  std::filesystem::create_directories(out_dir);
  writeTrialCsv(rows, out_dir + "/results.csv");
  writeTimingsCsv(rows, out_dir + "/timings.csv");
  std::ofstream agg(out_dir + "/aggregate.json");
  if (!agg) throw std::runtime_error("cannot write aggregate.json in " + out_dir);
  agg << aggregateJson(rows) << '\n';
}

}  // namespace

void ExperimentSpec::validate() const {
  otfs.validate();
  if (estimators.empty()) throw std::invalid_argument("ExperimentSpec: no estimators");
  std::set<std::string> ids;
  for (const EstimatorSpec& e : estimators) {
    if (e.type != "jspl" && e.type != "omp" && e.type != "somp3d")
      throw std::invalid_argument("ExperimentSpec: unknown estimator type " + e.type);
    if (!ids.insert(e.id).second)
      throw std::invalid_argument("ExperimentSpec: duplicate estimator id " + e.id);
    if (e.overhead && (!(*e.overhead > 0.0) || *e.overhead > 1.0))
      throw std::invalid_argument("ExperimentSpec: estimator overhead out of range");
  }
  if (snr_grid_db.empty() || speeds_mps.empty() || overheads.empty())
    throw std::invalid_argument("ExperimentSpec: empty sweep grid");
  if (n_trials < 1) throw std::invalid_argument("ExperimentSpec: n_trials must be >= 1");
  if (n_paths < 1) throw std::invalid_argument("ExperimentSpec: n_paths must be >= 1");
}

ExperimentSpec experimentSpecFromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("ExperimentSpec: unsupported schema_version");

  ExperimentSpec spec;
  spec.otfs = otfsFromJson(j.value("otfs", nlohmann::json::object()));
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    spec.n_paths = c.value("n_paths", spec.n_paths);
    spec.on_grid = c.value("on_grid", spec.on_grid);
    spec.cluster_aod = c.value("cluster_aod", spec.cluster_aod);
    spec.overdelay_fraction = c.value("overdelay_fraction", spec.overdelay_fraction);
  }
  for (const auto& je : j.at("estimators")) {
    EstimatorSpec est;
    est.type = je.at("type").get<std::string>();
    est.id = je.value("id", est.type);
    const nlohmann::json cfg = je.value("config", nlohmann::json::object());
    if (est.type == "jspl") est.jspl = jsplFromJson(cfg);
    else est.omp = ompFromJson(cfg);
    if (je.contains("overhead")) est.overhead = je.at("overhead").get<double>();
    spec.estimators.push_back(std::move(est));
  }
  spec.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
  spec.speeds_mps = j.at("speeds_mps").get<std::vector<double>>();
  spec.overheads = j.at("overheads").get<std::vector<double>>();
  spec.n_trials = j.at("n_trials").get<int>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.max_dense_elements = j.value("max_dense_elements", spec.max_dense_elements);
  spec.validate();
  return spec;
}

ExperimentSpec loadExperimentSpec(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("loadExperimentSpec: cannot open " + file);
  std::stringstream ss;
  ss << is.rdbuf();
  return experimentSpecFromJson(ss.str());
}

std::vector<TrialResult> runExperiment(const ExperimentSpec& spec, const std::string& out_dir,
                                       int n_threads, int trials_override) {
  spec.validate();
  const int trials = trials_override > 0 ? trials_override : spec.n_trials;
  const int n_over = static_cast<int>(spec.overheads.size());
  const int n_items = n_over * trials;
  std::vector<std::vector<TrialResult>> per_item(static_cast<std::size_t>(n_items));

  parallelFor(n_items, n_threads, [&](int item) {
    const int oi = item / trials;
    const int ti = item % trials;
    const double overhead = spec.overheads[static_cast<std::size_t>(oi)];
    auto& rows = per_item[static_cast<std::size_t>(item)];

    auto emitCell = [&](double snr, double speed, std::uint64_t ch_seed,
                        const std::string& status) {
      for (const EstimatorSpec& est : spec.estimators) {
        TrialResult row;
        row.kind = "nmse";
        row.estimator = est.id;
        row.snr_db = snr;
        row.speed_mps = speed;
        row.overhead = overhead;
        row.trial = ti;
        row.channel_seed = ch_seed;
        row.status = status;
        rows.push_back(std::move(row));
      }
    };

    std::shared_ptr<const DdOperator> op;
    try {
      const PilotPattern pilots = makePilotPattern(
          spec.otfs, overhead,
          deriveSeed(spec.seed, kPilotTag, static_cast<std::uint64_t>(oi),
                     static_cast<std::uint64_t>(ti)));
      op = std::make_shared<DdOperator>(pilots, spec.otfs, spec.max_dense_elements);
    } catch (const std::exception& e) {
      for (std::size_t si = 0; si < spec.speeds_mps.size(); ++si)
        for (double snr : spec.snr_grid_db)
          emitCell(snr, spec.speeds_mps[si], 0, std::string("error: ") + e.what());
      return;
    }

    for (std::size_t si = 0; si < spec.speeds_mps.size(); ++si) {
      const double speed = spec.speeds_mps[si];
      const std::uint64_t ch_seed =
          deriveSeed(spec.seed, kChannelTag, si, static_cast<std::uint64_t>(ti));
      PathSet paths;
      DdaChannel truth;
      std::vector<Eigen::Index> true_support;
      try {
        PathSamplingOptions opts;
        opts.n_paths = spec.n_paths;
        opts.max_speed_mps = speed;
        opts.overdelay_fraction = spec.overdelay_fraction;
        opts.on_grid = spec.on_grid;
        opts.cluster_aod = spec.cluster_aod;
        paths = samplePaths(spec.otfs, opts, ch_seed);
        truth = ddaChannel(paths, spec.otfs);
        true_support = epsilonSupport(truth);
      } catch (const std::exception& e) {
        for (double snr : spec.snr_grid_db)
          emitCell(snr, speed, ch_seed, std::string("error: ") + e.what());
        continue;
      }

      for (std::size_t ni = 0; ni < spec.snr_grid_db.size(); ++ni) {
        const double snr = spec.snr_grid_db[ni];
        const std::uint64_t noise_seed =
            deriveSeed(deriveSeed(spec.seed, kNoiseTag, ni, si),
                       static_cast<std::uint64_t>(oi), static_cast<std::uint64_t>(ti));
        MeasurementModel model;
        try {
          model = observe(paths, op, snr, noise_seed);
        } catch (const std::exception& e) {
          emitCell(snr, speed, ch_seed, std::string("error: ") + e.what());
          continue;
        }

        for (const EstimatorSpec& est : spec.estimators) {
          TrialResult row;
          row.kind = "nmse";
          row.estimator = est.id;
          row.snr_db = snr;
          row.speed_mps = speed;
          row.overhead = overhead;
          row.trial = ti;
          row.channel_seed = ch_seed;
          try {
            const EstimateOutcome outcome = runEstimator(est, model);
            row.status = outcome.status;
            row.runtime_s = outcome.runtime_s;
            row.nmse_value = nmse(outcome.estimate, truth);
            row.support_size = static_cast<Eigen::Index>(outcome.support.size());
            std::tie(row.support_precision, row.support_recall) =
                precisionRecall(outcome.support, true_support);
          } catch (const std::exception& e) {
            row.status = std::string("error: ") + e.what();
          }
          rows.push_back(std::move(row));
        }
      }
    }
  });

  std::vector<TrialResult> rows;
  for (auto& chunk : per_item)
    for (TrialResult& r : chunk) rows.push_back(std::move(r));
  std::sort(rows.begin(), rows.end(), rowLess);
  writeOutputs(rows, out_dir);
  return rows;
}

std::vector<TrialResult> runBer(const ExperimentSpec& spec, const std::string& out_dir,
                                int n_threads, int trials_override) {
  spec.validate();
  const int trials = trials_override > 0 ? trials_override : spec.n_trials;
  const double speed = spec.speeds_mps.front();
  std::vector<std::vector<TrialResult>> per_item(static_cast<std::size_t>(trials));

  parallelFor(trials, n_threads, [&](int ti) {
    auto& rows = per_item[static_cast<std::size_t>(ti)];
    const std::uint64_t ch_seed =
        deriveSeed(spec.seed, kChannelTag, 0, static_cast<std::uint64_t>(ti));

    PathSet paths;
    DdaChannel truth;
    try {
      PathSamplingOptions opts;
      opts.n_paths = spec.n_paths;
      opts.max_speed_mps = speed;
      opts.overdelay_fraction = spec.overdelay_fraction;
      opts.on_grid = spec.on_grid;
      opts.cluster_aod = spec.cluster_aod;
      paths = samplePaths(spec.otfs, opts, ch_seed);
      truth = ddaChannel(paths, spec.otfs);
    } catch (const std::exception& e) {
      TrialResult row;
      row.kind = "ber";
      row.estimator = "perfect";
      row.trial = ti;
      row.channel_seed = ch_seed;
      row.status = std::string("error: ") + e.what();
      rows.push_back(std::move(row));
      return;
    }

    // One operator per estimator, reused across the SNR grid.
    std::vector<std::shared_ptr<const DdOperator>> ops(spec.estimators.size());
    std::vector<double> est_overheads(spec.estimators.size());
    for (std::size_t ei = 0; ei < spec.estimators.size(); ++ei) {
      est_overheads[ei] = spec.estimators[ei].overhead.value_or(spec.overheads.front());
      const PilotPattern pilots = makePilotPattern(
          spec.otfs, est_overheads[ei],
          deriveSeed(spec.seed, kPilotTag, ei, static_cast<std::uint64_t>(ti)));
      ops[ei] = std::make_shared<DdOperator>(pilots, spec.otfs, spec.max_dense_elements);
    }

    for (std::size_t ni = 0; ni < spec.snr_grid_db.size(); ++ni) {
      const double snr = spec.snr_grid_db[ni];
      const std::uint64_t data_seed =
          deriveSeed(spec.seed, kDataTag, ni, static_cast<std::uint64_t>(ti));
      const std::uint64_t data_noise_seed =
          deriveSeed(spec.seed, kDataNoiseTag, ni, static_cast<std::uint64_t>(ti));

      {
        TrialResult row;
        row.kind = "ber";
        row.estimator = "perfect";
        row.snr_db = snr;
        row.speed_mps = speed;
        row.overhead = 0.0;
        row.trial = ti;
        row.channel_seed = ch_seed;
        try {
          const auto start = std::chrono::steady_clock::now();
          row.ber = berTrial(truth, paths, spec.otfs, snr, data_seed, data_noise_seed).ber;
          row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                        start)
                              .count();
          row.nmse_value = 0.0;
          row.support_precision = 1.0;
          row.support_recall = 1.0;
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
      }

      for (std::size_t ei = 0; ei < spec.estimators.size(); ++ei) {
        const EstimatorSpec& est = spec.estimators[ei];
        TrialResult row;
        row.kind = "ber";
        row.estimator = est.id;
        row.snr_db = snr;
        row.speed_mps = speed;
        row.overhead = est_overheads[ei];
        row.trial = ti;
        row.channel_seed = ch_seed;
        try {
          const std::uint64_t est_noise_seed =
              deriveSeed(deriveSeed(spec.seed, kNoiseTag, ni, 0), ei,
                         static_cast<std::uint64_t>(ti));
          const MeasurementModel model = observe(paths, ops[ei], snr, est_noise_seed);
          const EstimateOutcome outcome = runEstimator(est, model);
          row.status = outcome.status;
          row.nmse_value = nmse(outcome.estimate, truth);
          row.support_size = static_cast<Eigen::Index>(outcome.support.size());
          const auto start = std::chrono::steady_clock::now();
          row.ber =
              berTrial(outcome.estimate, paths, spec.otfs, snr, data_seed, data_noise_seed)
                  .ber;
          row.runtime_s =
              outcome.runtime_s +
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } catch (const std::exception& e) {
          row.status = std::string("error: ") + e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  });

  std::vector<TrialResult> rows;
  for (auto& chunk : per_item)
    for (TrialResult& r : chunk) rows.push_back(std::move(r));
  std::sort(rows.begin(), rows.end(), rowLess);
  writeOutputs(rows, out_dir);
  return rows;
}

void writeTrialCsv(const std::vector<TrialResult>& rows, const std::string& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("writeTrialCsv: cannot open " + file);
  os << "schema_version,kind,estimator,snr_db,speed_mps,overhead,trial,channel_seed,"
        "status,nmse,support_precision,support_recall,support_size,ber\r\n";
  for (const TrialResult& r : rows) {
    os << 1 << ',' << csvField(r.kind) << ',' << csvField(r.estimator) << ','
       << fmtDouble(r.snr_db) << ',' << fmtDouble(r.speed_mps) << ','
       << fmtDouble(r.overhead) << ',' << r.trial << ',' << r.channel_seed << ','
       << csvField(r.status) << ',' << fmtDouble(r.nmse_value) << ','
       << fmtDouble(r.support_precision) << ',' << fmtDouble(r.support_recall) << ','
       << r.support_size << ',' << fmtDouble(r.ber) << "\r\n";
  }
}

void writeTimingsCsv(const std::vector<TrialResult>& rows, const std::string& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("writeTimingsCsv: cannot open " + file);
  os << "kind,estimator,snr_db,speed_mps,overhead,trial,runtime_s\r\n";
  for (const TrialResult& r : rows) {
    os << csvField(r.kind) << ',' << csvField(r.estimator) << ',' << fmtDouble(r.snr_db)
       << ',' << fmtDouble(r.speed_mps) << ',' << fmtDouble(r.overhead) << ',' << r.trial
       << ',' << fmtDouble(r.runtime_s) << "\r\n";
  }
}

std::string aggregateJson(const std::vector<TrialResult>& rows) {
  struct Cell {
    std::vector<double> nmses, bers, precisions, recalls;
    int n_total = 0;
  };
  std::map<std::tuple<std::string, std::string, double, double, double>, Cell> cells;
  for (const TrialResult& r : rows) {
    Cell& c = cells[{r.kind, r.estimator, r.snr_db, r.speed_mps, r.overhead}];
    ++c.n_total;
    if (!std::isnan(r.nmse_value)) c.nmses.push_back(r.nmse_value);
    if (!std::isnan(r.ber)) c.bers.push_back(r.ber);
    if (!std::isnan(r.support_precision)) c.precisions.push_back(r.support_precision);
    if (!std::isnan(r.support_recall)) c.recalls.push_back(r.support_recall);
  }

  nlohmann::json out;
  out["schema_version"] = 1;
  out["cells"] = nlohmann::json::array();
  for (const auto& [key, c] : cells) {
    nlohmann::json jc;
    jc["kind"] = std::get<0>(key);
    jc["estimator"] = std::get<1>(key);
    jc["snr_db"] = std::get<2>(key);
    jc["speed_mps"] = std::get<3>(key);
    jc["overhead"] = std::get<4>(key);
    jc["n_total"] = c.n_total;
    jc["n_valid"] = static_cast<int>(c.nmses.size());
    if (!c.nmses.empty()) {
      const double med = median(c.nmses);
      jc["median_nmse"] = med;
      if (med > 0.0) jc["median_nmse_db"] = 10.0 * std::log10(med);
    }
    if (!c.bers.empty()) jc["median_ber"] = median(c.bers);
    if (!c.precisions.empty()) jc["median_support_precision"] = median(c.precisions);
    if (!c.recalls.empty()) jc["median_support_recall"] = median(c.recalls);
    out["cells"].push_back(std::move(jc));
  }
  return out.dump(2);
}

SupportMapSpec loadSupportMapSpec(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("loadSupportMapSpec: cannot open " + file);
  std::stringstream ss;
  ss << is.rdbuf();
  const nlohmann::json j = nlohmann::json::parse(ss.str());
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("SupportMapSpec: unsupported schema_version");

  SupportMapSpec spec;
  spec.otfs = otfsFromJson(j.value("otfs", nlohmann::json::object()));
  spec.jspl = jsplFromJson(j.value("jspl", nlohmann::json::object()));
  spec.n_paths = j.value("n_paths", spec.n_paths);
  spec.speed_mps = j.value("speed_mps", spec.speed_mps);
  if (j.contains("snr_db") && !j.at("snr_db").is_null())
    spec.snr_db = j.at("snr_db").get<double>();
  spec.overhead = j.value("overhead", spec.overhead);
  spec.on_grid = j.value("on_grid", spec.on_grid);
  spec.cluster_aod = j.value("cluster_aod", spec.cluster_aod);
  spec.overdelay_fraction = j.value("overdelay_fraction", spec.overdelay_fraction);
  spec.seed = j.value("seed", spec.seed);
  if (j.contains("paths_file") && !j.at("paths_file").is_null())
    spec.paths_file = j.at("paths_file").get<std::string>();
  return spec;
}

std::string exportSupportMap(const SupportMapSpec& spec, JsplDiagnostics* diagnostics) {
  const OtfsConfig& cfg = spec.otfs;
  cfg.validate();

  PathSet paths;
  if (spec.paths_file) {
    paths = loadPathSet(*spec.paths_file, cfg);
  } else {
    PathSamplingOptions opts;
    opts.n_paths = spec.n_paths;
    opts.max_speed_mps = spec.speed_mps;
    opts.overdelay_fraction = spec.overdelay_fraction;
    opts.on_grid = spec.on_grid;
    opts.cluster_aod = spec.cluster_aod;
    paths = samplePaths(cfg, opts, deriveSeed(spec.seed, kChannelTag, 0));
  }
  const DdaChannel truth = ddaChannel(paths, cfg);

  const PilotPattern pilots =
      makePilotPattern(cfg, spec.overhead, deriveSeed(spec.seed, kPilotTag, 0));
  const MeasurementModel model =
      observe(paths, pilots, cfg, spec.snr_db, deriveSeed(spec.seed, kNoiseTag, 0));
  const JsplResult result = runJspl(model, spec.jspl);
  if (diagnostics) *diagnostics = result.diagnostics;

  const GridDims dims = cfg.dims();
  auto plane = [&](auto&& value) {
    // Doppler-angle magnitude map, L2-collapsed over delay; rows follow the
    // storage order (k = -n_doppler/2 first), columns likewise in r.
    std::vector<std::vector<double>> grid(
        static_cast<std::size_t>(dims.n_doppler),
        std::vector<double>(static_cast<std::size_t>(dims.n_tx), 0.0));
    for (int k = -dims.n_doppler / 2; k < dims.n_doppler / 2; ++k)
      for (int r = -dims.n_tx / 2; r < dims.n_tx / 2; ++r) {
        double acc = 0.0;
        for (int l = 0; l < dims.n_delay; ++l) acc += value(l, k, r);
        grid[static_cast<std::size_t>(k + dims.n_doppler / 2)]
            [static_cast<std::size_t>(r + dims.n_tx / 2)] = std::sqrt(acc);
      }
    return grid;
  };

  const bool have_lambda = result.lambda.size() == dims.colCount();
  const auto true_map =
      plane([&](int l, int k, int r) { return std::norm(truth.at(l, k, r)); });
  const auto learned_map = plane([&](int l, int k, int r) {
    if (!have_lambda) return 0.0;
    const double v = result.lambda[ddaFlatIndex(dims, l, k, r)];
    return v * v;
  });

  nlohmann::json out;
  out["schema_version"] = 1;
  out["n_delay"] = dims.n_delay;
  out["n_doppler"] = dims.n_doppler;
  out["n_tx"] = dims.n_tx;
  out["status"] = result.diagnostics.status;
  out["nmse"] = truth.flat().squaredNorm() > 0.0 ? nlohmann::json(nmse(result.estimate, truth))
                                                 : nlohmann::json(nullptr);
  out["delay_taps"] = result.support.delay_taps;
  out["true_map"] = true_map;
  out["learned_map"] = learned_map;

  out["per_tap"] = nlohmann::json::array();
  for (int l : result.support.delay_taps) {
    nlohmann::json slice;
    slice["delay"] = l;
    std::vector<std::vector<double>> ts(
        static_cast<std::size_t>(dims.n_doppler),
        std::vector<double>(static_cast<std::size_t>(dims.n_tx), 0.0));
    auto ls = ts;
    for (int k = -dims.n_doppler / 2; k < dims.n_doppler / 2; ++k)
      for (int r = -dims.n_tx / 2; r < dims.n_tx / 2; ++r) {
        ts[static_cast<std::size_t>(k + dims.n_doppler / 2)]
          [static_cast<std::size_t>(r + dims.n_tx / 2)] = std::abs(truth.at(l, k, r));
        if (have_lambda)
          ls[static_cast<std::size_t>(k + dims.n_doppler / 2)]
            [static_cast<std::size_t>(r + dims.n_tx / 2)] =
                result.lambda[ddaFlatIndex(dims, l, k, r)];
      }
    slice["true_slice"] = ts;
    slice["learned_slice"] = ls;
    out["per_tap"].push_back(std::move(slice));
  }
  return out.dump(2);
}

}  // namespace jspl
