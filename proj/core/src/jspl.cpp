// SPDX-License-Identifier: Apache-2.0
#include "jspl/jspl.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <tuple>

namespace jspl {

void JsplConfig::validate() const {
  if (t_max < 1) throw std::invalid_argument("JsplConfig: t_max must be >= 1");
  if (!(eps1 > 0.0)) throw std::invalid_argument("JsplConfig: eps1 must be > 0");
  if (!(eps2_delay > 0.0) || !(eps2_entry > 0.0))
    throw std::invalid_argument("JsplConfig: thresholds must be > 0");
  if (!(damping > 0.0) || damping > 1.0)
    throw std::invalid_argument("JsplConfig: damping must be in (0, 1]");
  if (xi_self < 0.0 || xi_nb < 0.0 || xi_self + xi_nb <= 0.0)
    throw std::invalid_argument("JsplConfig: weights must be >= 0 and not both zero");
  if (neighbor_radius < 0) throw std::invalid_argument("JsplConfig: neighbor_radius < 0");
  if (!(lambda_init > 0.0) || lambda_init >= 1.0)
    throw std::invalid_argument("JsplConfig: lambda_init must be in (0, 1)");
  if (!(lambda_floor > 0.0) || lambda_floor >= 0.5)
    throw std::invalid_argument("JsplConfig: lambda_floor must be in (0, 0.5)");
  if (max_support < 0) throw std::invalid_argument("JsplConfig: max_support < 0");
}

SpikeSlabMoments spikeSlabPosterior(double lambda, double mu_part, double beta_part,
                                    double gamma_part) {
  // Log odds of spike vs slab; phi = sigmoid(-d) avoids underflow on
  // either side.
  const double var_slab = gamma_part + mu_part;
  const double log_spike = -0.5 * std::log(2.0 * kPi * gamma_part) -
                           beta_part * beta_part / (2.0 * gamma_part);
  const double log_slab =
      -0.5 * std::log(2.0 * kPi * var_slab) - beta_part * beta_part / (2.0 * var_slab);
  const double d = log_spike - log_slab + std::log1p(-lambda) - std::log(lambda);

  SpikeSlabMoments out;
  out.phi = 1.0 / (1.0 + std::exp(d));
  const double m = mu_part * beta_part / var_slab;      // slab posterior mean
  const double s2 = mu_part * gamma_part / var_slab;    // slab posterior variance
  out.mean = out.phi * m;
  out.var = std::max(0.0, out.phi * (s2 + m * m) - out.mean * out.mean);
  return out;
}

void ampForward(JsplState& state, const DdOperator& op, const VectorXcd& y, double damping) {
  const VectorXd v_raw = op.applyAbsSquared(state.v);
  state.V = damping * v_raw + (1.0 - damping) * state.V;
  const VectorXcd resid = y - op.apply(state.h_bar);
  VectorXcd s_raw(op.rows());
  for (int m = 0; m < op.rows(); ++m)
    s_raw[m] = (resid[m] + state.V[m] * state.S[m]) / (state.eta + state.V[m]);
  state.S = damping * s_raw + (1.0 - damping) * state.S;
}

void ampBackward(JsplState& state, const DdOperator& op) {
  VectorXd w(op.rows());
  for (int m = 0; m < op.rows(); ++m) w[m] = 1.0 / (state.eta + state.V[m]);
  state.gamma = op.applyAbsSquaredAdjoint(w).cwiseInverse();
  state.beta = state.h_bar + state.gamma.cwiseProduct(op.applyAdjoint(state.S));
}

void posteriorUpdate(JsplState& state, double damping) {
  const Eigen::Index n = state.lambda.size();
  VectorXcd h_raw(n);
  VectorXd v_raw(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mu_part = state.mu / 2.0;
    const double gamma_part = state.gamma[i] / 2.0;
    const SpikeSlabMoments re =
        spikeSlabPosterior(state.lambda[i], mu_part, state.beta[i].real(), gamma_part);
    const SpikeSlabMoments im =
        spikeSlabPosterior(state.lambda[i], mu_part, state.beta[i].imag(), gamma_part);
    h_raw[i] = {re.mean, im.mean};
    v_raw[i] = re.var + im.var;
    state.phi[i] = 0.5 * (re.phi + im.phi);
  }
  state.h_bar = damping * h_raw + (1.0 - damping) * state.h_bar;
  state.v = damping * v_raw + (1.0 - damping) * state.v;
}

VectorXd lambdaAdjacentUpdate(const VectorXd& phi, const JsplConfig& cfg,
                              const GridDims& dims) {
  if (phi.size() != dims.colCount())
    throw std::invalid_argument("lambdaAdjacentUpdate: phi length mismatch");
  VectorXd out(phi.size());
  const int half_k = dims.n_doppler / 2;
  const int half_r = dims.n_tx / 2;
  for (Eigen::Index n = 0; n < phi.size(); ++n) {
    const DdaIndex at = ddaFlatToIndex(dims, n);
    double num = cfg.xi_self * phi[n];
    double den = cfg.xi_self;
    double weight = cfg.xi_nb;
    for (int a = 1; a <= cfg.neighbor_radius; ++a, weight *= 0.5) {
      if (weight == 0.0) break;
      for (int dk = -a; dk <= a; ++dk) {
        const int dr_mag = a - std::abs(dk);
        for (int dr = -dr_mag; dr <= dr_mag; dr += std::max(1, 2 * dr_mag)) {
          const int kk = at.k + dk;
          if (kk < -half_k || kk >= half_k) continue;  // Doppler band edge
          int rr = at.r + dr;                          // angle axis wraps
          rr = ((rr + half_r) % dims.n_tx + dims.n_tx) % dims.n_tx - half_r;
          num += weight * phi[ddaFlatIndex(dims, at.l, kk, rr)];
          den += weight;
        }
      }
    }
    out[n] = std::clamp(num / den, cfg.lambda_floor, 1.0 - cfg.lambda_floor);
  }
  return out;
}

void updateMuEta(JsplState& state, double eta_floor) {
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < state.lambda.size(); ++i) {
    const double mu_part = state.mu / 2.0;
    const double gamma_part = state.gamma[i] / 2.0;
    const double var_slab = gamma_part + mu_part;
    const double s2 = mu_part * gamma_part / var_slab;
    const std::array<double, 2> parts = {state.beta[i].real(), state.beta[i].imag()};
    for (double b : parts) {
      const SpikeSlabMoments mom =
          spikeSlabPosterior(state.lambda[i], mu_part, b, gamma_part);
      const double m = mu_part * b / var_slab;
      num += mom.phi * (m * m + s2);
      den += mom.phi;
    }
  }
  if (den > 0.0) state.mu = 2.0 * num / den;

  double eta_acc = 0.0;
  for (Eigen::Index m = 0; m < state.V.size(); ++m) {
    const Complex es = state.eta * state.S[m];
    eta_acc += std::norm(es) + state.eta * state.V[m] / (state.eta + state.V[m]);
  }
  state.eta = std::max(eta_acc / static_cast<double>(state.V.size()), eta_floor);
}

SupportSet supportFromLambda(const VectorXd& lambda, const JsplConfig& cfg,
                             const GridDims& dims) {
  SupportSet out;
  VectorXd slice_norm(dims.n_delay);
  for (int l = 0; l < dims.n_delay; ++l) {
    double acc = 0.0;
    for (int k = -dims.n_doppler / 2; k < dims.n_doppler / 2; ++k)
      for (int r = -dims.n_tx / 2; r < dims.n_tx / 2; ++r) {
        const double val = lambda[ddaFlatIndex(dims, l, k, r)];
        acc += val * val;
      }
    slice_norm[l] = std::sqrt(acc);
  }
  const double threshold = cfg.eps2_delay * slice_norm.maxCoeff();
  struct Entry {
    double val;
    int l, k, r;
  };
  std::vector<Entry> entries;
  for (int l = 0; l < dims.n_delay; ++l) {
    if (!(slice_norm[l] > threshold)) continue;
    for (int k = -dims.n_doppler / 2; k < dims.n_doppler / 2; ++k)
      for (int r = -dims.n_tx / 2; r < dims.n_tx / 2; ++r) {
        const double val = lambda[ddaFlatIndex(dims, l, k, r)];
        if (val > cfg.eps2_entry) entries.push_back({val, l, k, r});
      }
  }
  if (cfg.max_support > 0 && entries.size() > static_cast<std::size_t>(cfg.max_support)) {
    std::nth_element(entries.begin(), entries.begin() + cfg.max_support, entries.end(),
                     [](const Entry& a, const Entry& b) { return a.val > b.val; });
    entries.resize(static_cast<std::size_t>(cfg.max_support));
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::tie(a.l, a.k, a.r) < std::tie(b.l, b.k, b.r);
  });
  for (const Entry& e : entries) {
    if (out.delay_taps.empty() || out.delay_taps.back() != e.l) {
      out.delay_taps.push_back(e.l);
      out.per_tap_da.emplace_back();
    }
    out.per_tap_da.back().emplace_back(e.k, e.r);
    out.flat.push_back(ddaFlatIndex(dims, e.l, e.k, e.r));
  }
  std::sort(out.flat.begin(), out.flat.end());
  out.n_paths_detected = static_cast<int>(out.delay_taps.size());
  return out;
}

std::pair<VectorXcd, bool> lsOnSupport(const DdOperator& op, const VectorXcd& y,
                                       const std::vector<Eigen::Index>& support) {
  VectorXcd h = VectorXcd::Zero(op.cols());
  if (support.empty()) return {h, false};
  MatrixXcd sub(op.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t j = 0; j < support.size(); ++j)
    sub.col(static_cast<Eigen::Index>(j)) = op.column(support[j]);
  Eigen::CompleteOrthogonalDecomposition<MatrixXcd> cod(sub);
  const VectorXcd x = cod.solve(y);
  for (std::size_t j = 0; j < support.size(); ++j) h[support[j]] = x[static_cast<Eigen::Index>(j)];
  const bool deficient = cod.rank() < static_cast<Eigen::Index>(support.size());
  return {h, deficient};
}

JsplState initJsplState(const MeasurementModel& model, const JsplConfig& cfg) {
  cfg.validate();
  const DdOperator& op = *model.op;
  const Eigen::Index n = op.cols();
  const int m = op.rows();
  const double y2 = model.y.squaredNorm();

  JsplState state;
  state.lambda = VectorXd::Constant(n, cfg.lambda_init);
  state.h_bar = VectorXcd::Zero(n);
  state.beta = VectorXcd::Zero(n);
  state.gamma = VectorXd::Ones(n);
  state.phi = VectorXd::Constant(n, cfg.lambda_init);
  state.V = VectorXd::Zero(m);
  state.S = VectorXcd::Zero(m);
  state.mu = cfg.mu_init > 0.0
                 ? cfg.mu_init
                 : y2 / (cfg.lambda_init * static_cast<double>(n) *
                         op.columnSquaredNorms().mean());
  state.eta = cfg.eta_init > 0.0 ? cfg.eta_init : 0.01 * y2 / m;
  state.v = VectorXd::Constant(n, cfg.lambda_init * state.mu);
  state.t = 0;
  return state;
}

void JsplDiagnostics::writeJsonLines(std::ostream& os) const {
  for (const JsplIterationRecord& rec : iterations) {
    os << "{\"t\":" << rec.t << ",\"lambda_delta\":" << rec.lambda_delta
       << ",\"mu\":" << rec.mu << ",\"eta\":" << rec.eta
       << ",\"support_size_estimate\":" << rec.support_size_estimate << "}\n";
  }
}

JsplResult runJspl(const MeasurementModel& model, const JsplConfig& cfg,
                   const std::function<void(const JsplState&)>& probe) {
  cfg.validate();
  const DdOperator& op = *model.op;
  const GridDims& dims = op.dims();

  JsplResult result{DdaChannel(dims), {}, {}, {}};
  if (model.y.squaredNorm() == 0.0) {
    result.diagnostics.status = "empty_support";
    return result;
  }

  const double eta_floor = 1e-12 * model.y.squaredNorm() / op.rows();
  JsplState state = initJsplState(model, cfg);

  for (int t = 1; t <= cfg.t_max; ++t) {
    state.t = t;
    const double damping = t == 1 ? 1.0 : cfg.damping;  // nothing to blend at t=1
    ampForward(state, op, model.y, damping);
    ampBackward(state, op);
    posteriorUpdate(state, damping);

    VectorXd lambda_new;
    if (cfg.plain_lambda_update) {
      lambda_new = state.phi.cwiseMax(cfg.lambda_floor).cwiseMin(1.0 - cfg.lambda_floor);
    } else {
      lambda_new = lambdaAdjacentUpdate(state.phi, cfg, dims);
    }
    updateMuEta(state, eta_floor);

    const double base = state.lambda.norm();
    const double delta = (lambda_new - state.lambda).norm();
    const double rel = base > 0.0 ? delta / base : 0.0;
    state.lambda = std::move(lambda_new);

    JsplIterationRecord rec;
    rec.t = t;
    rec.lambda_delta = rel;
    rec.mu = state.mu;
    rec.eta = state.eta;
    rec.support_size_estimate =
        (state.lambda.array() > cfg.eps2_entry).count();
    result.diagnostics.iterations.push_back(rec);
    if (probe) probe(state);

    if (rel < cfg.eps1) {
      result.diagnostics.converged = true;
      break;
    }
  }
  result.diagnostics.n_iterations = static_cast<int>(result.diagnostics.iterations.size());
  result.lambda = state.lambda;

  result.support = supportFromLambda(state.lambda, cfg, dims);
  if (result.support.flat.empty()) {
    result.diagnostics.status = "empty_support";
    return result;
  }

  auto [h, deficient] = lsOnSupport(op, model.y, result.support.flat);
  result.estimate = DdaChannel(dims, std::move(h));
  result.diagnostics.rank_deficient =
      deficient || static_cast<Eigen::Index>(result.support.flat.size()) > op.rows();
  if (result.diagnostics.rank_deficient) result.diagnostics.status = "rank_deficient";
  return result;
}

}  // namespace jspl
