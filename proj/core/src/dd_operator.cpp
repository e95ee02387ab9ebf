// SPDX-License-Identifier: Apache-2.0
#include "jspl/dd_operator.hpp"

namespace jspl {

DdOperator::DdOperator(const PilotPattern& pilots, const OtfsConfig& cfg,
                       Eigen::Index max_dense_elements)
    : cfg_(cfg), pilots_(pilots), dims_(cfg.dims()) {
  cfg_.validate();
  pilots_.validate(cfg_);

  const int nl = cfg_.n_delay, nk = cfg_.n_doppler, nt = cfg_.n_tx;
  const double norm = 1.0 / (static_cast<double>(nk) * nt);

  kernel_.assign(nt, MatrixXcd::Zero(nl, nk));
  for (int ri = 0; ri < nt; ++ri) {
    const int r = ri - nt / 2;
    MatrixXcd& ker = kernel_[ri];
    for (int i = 0; i < pilots_.count(); ++i) {
      const auto [l, k] = pilots_.positions[i];
      Complex acc{0.0, 0.0};
      for (int q = 0; q < nt; ++q)
        acc += unitPhasor(2.0 * kPi * q * r / nt) * pilots_.symbols(i, q);
      ker(l, k + nk / 2) += norm * acc;
    }
  }

  col_sq_norms_.resize(cols());
  for (int ri = 0; ri < nt; ++ri) {
    const double block_norm = kernel_[ri].squaredNorm();
    if (!(block_norm > 0.0))
      throw std::invalid_argument("DdOperator: pilot pattern yields an all-zero column block");
    col_sq_norms_.segment(static_cast<Eigen::Index>(ri) * rows(), rows()).setConstant(block_norm);
  }

  if (static_cast<Eigen::Index>(rows()) * cols() <= max_dense_elements) {
    dense_.resize(rows(), cols());
    for (Eigen::Index n = 0; n < cols(); ++n) dense_.col(n) = column(n);
    dense2_ = dense_.cwiseAbs2();
  }
}

Complex DdOperator::cPhase(int l, int k_col) const {
  return unitPhasor(2.0 * kPi * l * k_col /
                    (static_cast<double>(cfg_.n_doppler) * cfg_.samplesPerSymbol()));
}

Complex DdOperator::kernelAt(int ri, int dl, int dk_raw) const {
  const int nl = cfg_.n_delay, nk = cfg_.n_doppler;
  const int a = ((dl % nl) + nl) % nl;
  const int c = ((dk_raw % nk) + nk + nk / 2) % nk;
  return kernel_[ri](a, c);
}

Complex DdOperator::entry(int m, Eigen::Index n) const {
  const auto [l, k] = ddRowToIndex(dims_, m);
  const DdaIndex col = ddaFlatToIndex(dims_, n);
  return kernelAt(col.r + cfg_.n_tx / 2, l - col.l, k - col.k) * cPhase(l, col.k);
}

VectorXcd DdOperator::column(Eigen::Index n) const {
  const DdaIndex col = ddaFlatToIndex(dims_, n);
  const int ri = col.r + cfg_.n_tx / 2;
  VectorXcd out(rows());
  for (int l = 0; l < cfg_.n_delay; ++l) {
    const Complex ph = cPhase(l, col.k);
    for (int k = -cfg_.n_doppler / 2; k < cfg_.n_doppler / 2; ++k)
      out[ddRowIndex(dims_, l, k)] = kernelAt(ri, l - col.l, k - col.k) * ph;
  }
  return out;
}

VectorXcd DdOperator::apply(const VectorXcd& h) const {
  if (h.size() != cols()) throw std::invalid_argument("DdOperator::apply: bad length");
  if (denseAvailable()) return dense_ * h;
  VectorXcd y = VectorXcd::Zero(rows());
  for (Eigen::Index n = 0; n < cols(); ++n) {
    if (h[n] == Complex{0.0, 0.0}) continue;
    y += column(n) * h[n];
  }
  return y;
}

VectorXcd DdOperator::applyAdjoint(const VectorXcd& u) const {
  if (u.size() != rows()) throw std::invalid_argument("DdOperator::applyAdjoint: bad length");
  if (denseAvailable()) return dense_.adjoint() * u;
  VectorXcd x(cols());
  for (Eigen::Index n = 0; n < cols(); ++n) x[n] = column(n).dot(u);
  return x;
}

VectorXd DdOperator::applyAbsSquared(const VectorXd& v) const {
  if (v.size() != cols()) throw std::invalid_argument("DdOperator::applyAbsSquared: bad length");
  if (denseAvailable()) return dense2_ * v;
  VectorXd y = VectorXd::Zero(rows());
  for (Eigen::Index n = 0; n < cols(); ++n) {
    if (v[n] == 0.0) continue;
    y += column(n).cwiseAbs2() * v[n];
  }
  return y;
}

VectorXd DdOperator::applyAbsSquaredAdjoint(const VectorXd& w) const {
  if (w.size() != rows())
    throw std::invalid_argument("DdOperator::applyAbsSquaredAdjoint: bad length");
  if (denseAvailable()) return dense2_.transpose() * w;
  VectorXd x(cols());
  for (Eigen::Index n = 0; n < cols(); ++n) x[n] = column(n).cwiseAbs2().dot(w);
  return x;
}

const MatrixXcd& DdOperator::dense() const {
  if (!denseAvailable())
    throw std::runtime_error("DdOperator: dense materialization exceeds the element budget");
  return dense_;
}

const MatrixXd& DdOperator::denseAbsSquared() const {
  if (!denseAvailable())
    throw std::runtime_error("DdOperator: dense materialization exceeds the element budget");
  return dense2_;
}

MatrixXcd DdOperator::phaseMatrix() const {
  MatrixXcd c(rows(), rows());
  for (int m = 0; m < rows(); ++m) {
    const auto [l, k] = ddRowToIndex(dims_, m);
    (void)k;
    for (int mc = 0; mc < rows(); ++mc) {
      const auto [lc, kc] = ddRowToIndex(dims_, mc);
      (void)lc;
      c(m, mc) = cPhase(l, kc);
    }
  }
  return c;
}

MatrixXcd DdOperator::angleBlock(int r) const {
  const int ri = r + cfg_.n_tx / 2;
  if (ri < 0 || ri >= cfg_.n_tx) throw std::invalid_argument("angleBlock: r out of range");
  MatrixXcd z(rows(), rows());
  for (int m = 0; m < rows(); ++m) {
    const auto [l, k] = ddRowToIndex(dims_, m);
    for (int mc = 0; mc < rows(); ++mc) {
      const auto [lc, kc] = ddRowToIndex(dims_, mc);
      z(m, mc) = kernelAt(ri, l - lc, k - kc);
    }
  }
  return z;
}

}  // namespace jspl
