// SPDX-License-Identifier: Apache-2.0
#include "jspl/dft.hpp"

#include <map>
#include <mutex>

namespace jspl {

namespace {

MatrixXcd makeDft(int n) {
  MatrixXcd f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      f(a, b) = scale * unitPhasor(-2.0 * kPi * a * b / n);
    }
  }
  return f;
}

const MatrixXcd& cached(int n, bool inverse) {
  static std::mutex mu;
  static std::map<std::pair<int, bool>, MatrixXcd> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find({n, inverse});
  if (it == cache.end()) {
    MatrixXcd f = makeDft(n);
    if (inverse) f = f.adjoint().eval();
    it = cache.emplace(std::make_pair(n, inverse), std::move(f)).first;
  }
  return it->second;
}

}  // namespace

const MatrixXcd& dftMatrix(int n) {
  if (n <= 0) throw std::invalid_argument("dftMatrix: size must be positive");
  return cached(n, false);
}

const MatrixXcd& idftMatrix(int n) {
  if (n <= 0) throw std::invalid_argument("idftMatrix: size must be positive");
  return cached(n, true);
}

MatrixXcd dopplerNaturalToDft(const MatrixXcd& x) {
  const Eigen::Index n = x.cols();
  const Eigen::Index half = n / 2;
  MatrixXcd out(x.rows(), n);
  for (Eigen::Index c = 0; c < n; ++c) out.col((c + half) % n) = x.col(c);
  return out;
}

MatrixXcd dopplerDftToNatural(const MatrixXcd& x) {
  const Eigen::Index n = x.cols();
  const Eigen::Index half = n / 2;
  MatrixXcd out(x.rows(), n);
  for (Eigen::Index c = 0; c < n; ++c) out.col(c) = x.col((c + half) % n);
  return out;
}

}  // namespace jspl
