// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jspl/baselines.hpp"
#include "jspl/jspl.hpp"

namespace jspl {

struct EstimatorSpec {
  std::string id;    // row label, unique within a spec
  std::string type;  // jspl | omp | somp3d
  JsplConfig jspl;
  OmpConfig omp;
  // Per-estimator pilot overhead for BER runs; NMSE sweeps use the spec's
  // overhead grid instead.
  std::optional<double> overhead;
};

struct ExperimentSpec {
  OtfsConfig otfs;
  std::vector<EstimatorSpec> estimators;
  std::vector<double> snr_grid_db;
  std::vector<double> speeds_mps;
  std::vector<double> overheads;
  int n_trials = 1;
  std::uint64_t seed = 1;

  int n_paths = 4;
  bool on_grid = false;
  bool cluster_aod = false;
  double overdelay_fraction = 0.25;
  Eigen::Index max_dense_elements = DdOperator::kDefaultDenseBudget;

  void validate() const;
};

ExperimentSpec experimentSpecFromJson(const std::string& text);
ExperimentSpec loadExperimentSpec(const std::string& file);

struct TrialResult {
  std::string kind;  // nmse | ber
  std::string estimator;
  double snr_db = 0.0;
  double speed_mps = 0.0;
  double overhead = 0.0;
  int trial = 0;
  std::uint64_t channel_seed = 0;
  std::string status = "ok";
  double nmse_value = std::numeric_limits<double>::quiet_NaN();
  double support_precision = std::numeric_limits<double>::quiet_NaN();
  double support_recall = std::numeric_limits<double>::quiet_NaN();
  Eigen::Index support_size = 0;
  double ber = std::numeric_limits<double>::quiet_NaN();
  double runtime_s = 0.0;
};

// Monte Carlo NMSE/support sweep over estimators x snr x speed x overhead x
// trial. Child seeds derive from the master seed and the sweep coordinates,
// so results are paired across estimators and independent of execution
// order. Writes results.csv (deterministic), timings.csv (wall-clock
// sidecar) and aggregate.json under out_dir when non-empty.
std::vector<TrialResult> runExperiment(const ExperimentSpec& spec, const std::string& out_dir,
                                       int n_threads = 1, int trials_override = 0);

// BER sweep: QPSK data frames through the true channel, equalized with each
// estimator's channel estimate plus the true channel ("perfect" rows).
// Estimators use their own pilot overhead here (default: the spec's first).
std::vector<TrialResult> runBer(const ExperimentSpec& spec, const std::string& out_dir,
                                int n_threads = 1, int trials_override = 0);

void writeTrialCsv(const std::vector<TrialResult>& rows, const std::string& file);
void writeTimingsCsv(const std::vector<TrialResult>& rows, const std::string& file);
std::string aggregateJson(const std::vector<TrialResult>& rows);

// One JSPL trial rendered as paired Doppler-angle magnitude maps (truth vs
// learned lambda), for external plotting.
struct SupportMapSpec {
  OtfsConfig otfs;
  JsplConfig jspl;
  int n_paths = 4;
  double speed_mps = 33.3;
  double snr_db = std::numeric_limits<double>::infinity();
  double overhead = 0.2;
  bool on_grid = true;
  bool cluster_aod = false;
  double overdelay_fraction = 0.25;
  std::uint64_t seed = 1;
  std::optional<std::string> paths_file;
};

SupportMapSpec loadSupportMapSpec(const std::string& file);
std::string exportSupportMap(const SupportMapSpec& spec, JsplDiagnostics* diagnostics = nullptr);

}  // namespace jspl
