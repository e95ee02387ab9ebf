// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "jspl/channel.hpp"

namespace jspl {

// ||estimate - truth||^2 / ||truth||^2.
double nmse(const DdaChannel& estimate, const DdaChannel& truth);

// Smallest index set (by magnitude) holding energy_fraction of the total
// energy; sorted. Handles off-grid leakage gracefully.
std::vector<Eigen::Index> epsilonSupport(const DdaChannel& truth, double energy_fraction = 0.999);

// Precision/recall of a detected set against a reference set (both sorted).
// Empty detected set: precision 1 by convention, recall 0 unless the
// reference is empty too.
std::pair<double, double> precisionRecall(const std::vector<Eigen::Index>& detected,
                                          const std::vector<Eigen::Index>& reference);

}  // namespace jspl
