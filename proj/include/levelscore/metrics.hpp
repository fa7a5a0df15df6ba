// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace levelscore::metrics {

struct PairedSeries {
  std::vector<double> predictions;
  std::vector<double> labels;
};

// Spearman rank correlation; ties receive average (fractional) ranks.
double srcc(const PairedSeries& series);

// Pearson linear correlation on the raw values, no nonlinear pre-fitting.
double plcc(const PairedSeries& series);

// (srcc + plcc) / 2.
double composite(const PairedSeries& series);

}  // namespace levelscore::metrics
