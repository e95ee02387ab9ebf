// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver. `run` sweeps NMSE/support metrics over the grids in a
// spec file, `ber` pushes data frames through estimated channels, and
// `supportmap` renders one trial's truth/learned sparsity maps as JSON.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <string>

#include "jspl/experiment.hpp"

namespace {

int runSweep(const std::string& spec_file, const std::string& out_dir, int trials,
             int threads, bool ber) {
  const jspl::ExperimentSpec spec = jspl::loadExperimentSpec(spec_file);
  const auto rows = ber ? jspl::runBer(spec, out_dir, threads, trials)
                        : jspl::runExperiment(spec, out_dir, threads, trials);
  int failed = 0;
  for (const auto& r : rows)
    if (r.status.rfind("error", 0) == 0) ++failed;
  std::cout << rows.size() << " rows -> " << out_dir;
  if (failed > 0) std::cout << " (" << failed << " failed trials)";
  std::cout << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"delay-Doppler-angle channel estimation experiments"};
  app.require_subcommand(1);

  std::string spec_file, out_dir, map_out, diag_out;
  int trials = 0, threads = 1;

  CLI::App* run = app.add_subcommand("run", "Monte Carlo NMSE/support sweep");
  run->add_option("spec", spec_file, "experiment spec (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--trials", trials, "override the spec's trial count");
  run->add_option("--threads", threads, "worker threads");

  CLI::App* ber = app.add_subcommand("ber", "uncoded QPSK bit error rate sweep");
  ber->add_option("spec", spec_file, "experiment spec (JSON)")->required();
  ber->add_option("--out", out_dir, "output directory")->required();
  ber->add_option("--trials", trials, "override the spec's trial count");
  ber->add_option("--threads", threads, "worker threads");

  CLI::App* smap = app.add_subcommand("supportmap", "export one trial's support maps");
  smap->add_option("spec", spec_file, "support map spec (JSON)")->required();
  smap->add_option("--out", map_out, "write the JSON here instead of stdout");
  smap->add_option("--diag", diag_out, "write per-iteration diagnostics (JSON lines)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return runSweep(spec_file, out_dir, trials, threads, false);
    if (ber->parsed()) return runSweep(spec_file, out_dir, trials, threads, true);

    jspl::JsplDiagnostics diag;
    const std::string json =
        jspl::exportSupportMap(jspl::loadSupportMapSpec(spec_file), &diag);
    if (map_out.empty()) {
      std::cout << json << '\n';
    } else {
      std::ofstream os(map_out);
      if (!os) throw std::runtime_error("cannot write " + map_out);
      os << json << '\n';
    }
    if (!diag_out.empty()) {
      std::ofstream os(diag_out);
      if (!os) throw std::runtime_error("cannot write " + diag_out);
      diag.writeJsonLines(os);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "estimate: " << e.what() << '\n';
    return 1;
  }
}
