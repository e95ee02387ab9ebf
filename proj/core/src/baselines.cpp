// SPDX-License-Identifier: Apache-2.0
#include "jspl/baselines.hpp"

#include <algorithm>
#include <set>

#include "jspl/jspl.hpp"

namespace jspl {

void OmpConfig::validate() const {
  if (max_atoms < 1) throw std::invalid_argument("OmpConfig: max_atoms must be >= 1");
  if (residual_tol < 0.0) throw std::invalid_argument("OmpConfig: residual_tol must be >= 0");
  for (int b : block_dims)
    if (b < 1) throw std::invalid_argument("OmpConfig: block_dims must be >= 1");
}

namespace {

struct GreedyState {
  std::vector<Eigen::Index> support;
  VectorXcd residual;
  VectorXcd h;
  bool refit(const DdOperator& op, const VectorXcd& y) {
    auto [est, deficient] = lsOnSupport(op, y, support);
    h = std::move(est);
    residual = y - op.apply(h);
    return deficient;
  }
};

SparseRecoveryResult finish(const DdOperator& op, GreedyState& st, int rounds, double y_norm) {
  SparseRecoveryResult out{DdaChannel(op.dims(), std::move(st.h)), std::move(st.support),
                           rounds, y_norm > 0.0 ? st.residual.norm() / y_norm : 0.0};
  std::sort(out.support.begin(), out.support.end());
  return out;
}

// Correlations of the residual against unit-normalized columns.
VectorXd normalizedCorrelation(const DdOperator& op, const VectorXcd& residual) {
  const VectorXcd raw = op.applyAdjoint(residual);
  return raw.cwiseAbs().array() / op.columnSquaredNorms().array().sqrt();
}

}  // namespace

SparseRecoveryResult omp(const MeasurementModel& model, const OmpConfig& cfg) {
  cfg.validate();
  const DdOperator& op = *model.op;
  const double y_norm = model.y.norm();

  GreedyState st;
  st.h = VectorXcd::Zero(op.cols());
  st.residual = model.y;
  if (y_norm == 0.0) return finish(op, st, 0, y_norm);

  std::set<Eigen::Index> chosen;
  int rounds = 0;
  while (static_cast<int>(st.support.size()) < cfg.max_atoms &&
         st.residual.norm() > cfg.residual_tol * y_norm) {
    const VectorXd corr = normalizedCorrelation(op, st.residual);
    Eigen::Index best = -1;
    double best_val = -1.0;
    for (Eigen::Index n = 0; n < corr.size(); ++n) {
      if (chosen.count(n)) continue;
      if (corr[n] > best_val) {
        best_val = corr[n];
        best = n;
      }
    }
    if (best < 0 || best_val <= 0.0) break;
    chosen.insert(best);
    st.support.push_back(best);
    st.refit(op, model.y);
    ++rounds;
  }
  return finish(op, st, rounds, y_norm);
}

SparseRecoveryResult somp3d(const MeasurementModel& model, const OmpConfig& cfg) {
  cfg.validate();
  const DdOperator& op = *model.op;
  const GridDims& dims = op.dims();
  if (cfg.block_dims[0] > dims.n_delay || cfg.block_dims[1] > dims.n_doppler ||
      cfg.block_dims[2] > dims.n_tx)
    throw std::invalid_argument("somp3d: block_dims exceed the grid");

  const double y_norm = model.y.norm();
  GreedyState st;
  st.h = VectorXcd::Zero(op.cols());
  st.residual = model.y;
  if (y_norm == 0.0) return finish(op, st, 0, y_norm);

  const auto [bl, bk, br] = cfg.block_dims;
  std::set<Eigen::Index> chosen;
  int rounds = 0;
  while (static_cast<int>(st.support.size()) < cfg.max_atoms &&
         st.residual.norm() > cfg.residual_tol * y_norm) {
    const VectorXd corr = normalizedCorrelation(op, st.residual);
    const VectorXd energy = corr.cwiseAbs2();

    // Slice energies over entries not yet selected.
    VectorXd slice = VectorXd::Zero(dims.n_delay);
    for (Eigen::Index n = 0; n < energy.size(); ++n) {
      if (chosen.count(n)) continue;
      slice[ddaFlatToIndex(dims, n).l] += energy[n];
    }
    int l_best = 0;
    slice.maxCoeff(&l_best);
    if (slice[l_best] <= 0.0) break;

    // Dominant block anchored at (l_best + [0,bl), k0 + [0,bk), r0 + [0,br));
    // Doppler truncates at the band edges, angle wraps.
    double block_best = -1.0;
    std::vector<Eigen::Index> pick_best;
    for (int k0 = -dims.n_doppler / 2; k0 < dims.n_doppler / 2; ++k0) {
      for (int r0 = -dims.n_tx / 2; r0 < dims.n_tx / 2; ++r0) {
        double acc = 0.0;
        std::vector<Eigen::Index> members;
        for (int dl = 0; dl < bl; ++dl) {
          const int l = l_best + dl;
          if (l >= dims.n_delay) continue;
          for (int dk = 0; dk < bk; ++dk) {
            const int k = k0 + dk;
            if (k >= dims.n_doppler / 2) continue;
            for (int dr = 0; dr < br; ++dr) {
              int r = r0 + dr;
              r = ((r + dims.n_tx / 2) % dims.n_tx + dims.n_tx) % dims.n_tx - dims.n_tx / 2;
              const Eigen::Index n = ddaFlatIndex(dims, l, k, r);
              if (chosen.count(n)) continue;
              acc += energy[n];
              members.push_back(n);
            }
          }
        }
        if (!members.empty() && acc > block_best) {
          block_best = acc;
          pick_best = std::move(members);
        }
      }
    }
    if (pick_best.empty() || block_best <= 0.0) break;

    std::sort(pick_best.begin(), pick_best.end());
    pick_best.erase(std::unique(pick_best.begin(), pick_best.end()), pick_best.end());
    for (Eigen::Index n : pick_best) {
      if (chosen.insert(n).second) st.support.push_back(n);
    }
    st.refit(op, model.y);
    ++rounds;
  }
  return finish(op, st, rounds, y_norm);
}

}  // namespace jspl
