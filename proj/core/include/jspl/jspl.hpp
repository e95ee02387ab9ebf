// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "jspl/measurement.hpp"

namespace jspl {

struct JsplConfig {
  int t_max = 50;
  double eps1 = 1e-3;        // relative lambda-change stopping tolerance
  double eps2_delay = 0.5;   // delay-slice threshold, relative to the max slice norm
  double eps2_entry = 0.1;   // absolute per-entry threshold on lambda
  double damping = 0.7;      // applied to h_bar, v, V, S (1.0 = undamped)
  double xi_self = 1.0;      // adjacency weight of the element itself
  double xi_nb = 0.5;        // weight of order-1 neighbors; higher orders decay by 1/2
  int neighbor_radius = 1;   // maximum neighbor order
  double lambda_init = 0.1;
  double mu_init = 0.0;      // <= 0 selects the data-driven default
  double eta_init = 0.0;     // <= 0 selects the data-driven default
  double lambda_floor = 1e-6;
  // Cap on |support| before the LS re-fit, keeping the largest-lambda
  // entries; 0 disables the cap.
  int max_support = 0;
  // Bypass the adjacency combination and set lambda <- phi directly;
  // reference trajectory for the degeneracy check.
  bool plain_lambda_update = false;

  void validate() const;
};

struct JsplState {
  VectorXd lambda;  // N, prior nonzero probabilities
  VectorXcd h_bar;  // N, posterior means
  VectorXd v;       // N, posterior variances
  VectorXcd beta;   // N, per-coefficient pseudo-measurements
  VectorXd gamma;   // N, pseudo-measurement variances
  VectorXd phi;     // N, posterior nonzero probabilities
  VectorXd V;       // M
  VectorXcd S;      // M
  double mu = 0.0;
  double eta = 0.0;
  int t = 0;
};

struct SupportSet {
  std::vector<int> delay_taps;
  // Per detected tap, the retained (k, r) pairs in signed order.
  std::vector<std::vector<std::pair<int, int>>> per_tap_da;
  std::vector<Eigen::Index> flat;  // sorted column indices
  int n_paths_detected = 0;
};

struct JsplIterationRecord {
  int t = 0;
  double lambda_delta = 0.0;  // relative lambda change
  double mu = 0.0;
  double eta = 0.0;
  Eigen::Index support_size_estimate = 0;
};

struct JsplDiagnostics {
  std::vector<JsplIterationRecord> iterations;
  bool converged = false;
  int n_iterations = 0;
  bool rank_deficient = false;
  std::string status = "ok";  // ok | empty_support | rank_deficient

  void writeJsonLines(std::ostream& os) const;
};

struct JsplResult {
  DdaChannel estimate;
  SupportSet support;
  JsplDiagnostics diagnostics;
  VectorXd lambda;  // final sparsity pattern, empty when the run bailed out
};

// Scalar spike-and-slab posterior for one real part: prior
// (1-lambda) delta0 + lambda N(0, mu_part), pseudo-measurement
// beta_part with variance gamma_part. Log-domain throughout.
struct SpikeSlabMoments {
  double phi;   // posterior nonzero probability
  double mean;  // posterior mean
  double var;   // posterior variance
};
SpikeSlabMoments spikeSlabPosterior(double lambda, double mu_part, double beta_part,
                                    double gamma_part);

// One AMP measurement-side update; damping blends with the previous V, S.
void ampForward(JsplState& state, const DdOperator& op, const VectorXcd& y, double damping);

// One AMP coefficient-side update (gamma, beta); undamped.
void ampBackward(JsplState& state, const DdOperator& op);

// Posterior moments per real/imaginary part; updates phi and the damped
// h_bar, v.
void posteriorUpdate(JsplState& state, double damping);

// Adjacency-weighted prior update over the Doppler-angle plane of each
// element's delay slice. Doppler neighbors truncate at the band edges;
// angle neighbors wrap cyclically.
VectorXd lambdaAdjacentUpdate(const VectorXd& phi, const JsplConfig& cfg, const GridDims& dims);

// EM updates of the slab variance and the noise variance from current
// state; keeps mu when the responsibilities vanish, floors eta.
void updateMuEta(JsplState& state, double eta_floor);

SupportSet supportFromLambda(const VectorXd& lambda, const JsplConfig& cfg,
                             const GridDims& dims);

// Least-squares re-fit restricted to the support columns (minimum-norm
// solution when the system is underdetermined).
std::pair<VectorXcd, bool> lsOnSupport(const DdOperator& op, const VectorXcd& y,
                                       const std::vector<Eigen::Index>& support);

JsplState initJsplState(const MeasurementModel& model, const JsplConfig& cfg);

// Full estimation pipeline. The optional probe runs after every iteration
// (used by invariant tests).
JsplResult runJspl(const MeasurementModel& model, const JsplConfig& cfg,
                   const std::function<void(const JsplState&)>& probe = {});

}  // namespace jspl
