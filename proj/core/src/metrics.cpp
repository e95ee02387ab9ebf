// SPDX-License-Identifier: Apache-2.0
#include "jspl/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace jspl {

double nmse(const DdaChannel& estimate, const DdaChannel& truth) {
  if (estimate.dims() != truth.dims()) throw std::invalid_argument("nmse: dims mismatch");
  const double denom = truth.flat().squaredNorm();
  if (denom == 0.0) throw std::invalid_argument("nmse: zero reference channel");
  return (estimate.flat() - truth.flat()).squaredNorm() / denom;
}

std::vector<Eigen::Index> epsilonSupport(const DdaChannel& truth, double energy_fraction) {
  const VectorXcd& h = truth.flat();
  const double total = h.squaredNorm();
  std::vector<Eigen::Index> order(h.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return std::norm(h[a]) > std::norm(h[b]); });

  std::vector<Eigen::Index> out;
  double acc = 0.0;
  for (Eigen::Index n : order) {
    if (total > 0.0 && acc >= energy_fraction * total) break;
    if (std::norm(h[n]) == 0.0) break;
    out.push_back(n);
    acc += std::norm(h[n]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<double, double> precisionRecall(const std::vector<Eigen::Index>& detected,
                                          const std::vector<Eigen::Index>& reference) {
  std::vector<Eigen::Index> both;
  std::set_intersection(detected.begin(), detected.end(), reference.begin(), reference.end(),
                        std::back_inserter(both));
  const double precision =
      detected.empty() ? 1.0 : static_cast<double>(both.size()) / detected.size();
  const double recall =
      reference.empty() ? 1.0 : static_cast<double>(both.size()) / reference.size();
  return {precision, recall};
}

}  // namespace jspl
