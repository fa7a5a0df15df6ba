// SPDX-License-Identifier: Apache-2.0
#include "levelscore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>

namespace levelscore::metrics {

namespace {

void check_series(const PairedSeries& series) {
  if (series.predictions.size() != series.labels.size()) {
    throw std::invalid_argument("paired series must have equal lengths");
  }
  if (series.predictions.size() < 3) {
    throw std::invalid_argument("correlation requires at least 3 pairs");
  }
  for (double v : series.predictions) {
    if (!std::isfinite(v)) throw std::invalid_argument("predictions contain non-finite values");
  }
  for (double v : series.labels) {
    if (!std::isfinite(v)) throw std::invalid_argument("labels contain non-finite values");
  }
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(n);
  mean_b /= static_cast<double>(n);

  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw std::domain_error("correlation undefined for a series with zero variance");
  }
  // Rounding can push a perfect correlation an ulp past 1.
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

// Fractional ranks, 1-based; tied values share the average of their ranks.
std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });

  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double srcc(const PairedSeries& series) {
  check_series(series);
  const std::vector<double> rank_pred = average_ranks(series.predictions);
  const std::vector<double> rank_label = average_ranks(series.labels);
  return pearson(rank_pred, rank_label);
}

double plcc(const PairedSeries& series) {
  check_series(series);
  return pearson(series.predictions, series.labels);
}

double composite(const PairedSeries& series) { return (srcc(series) + plcc(series)) / 2.0; }

}  // namespace levelscore::metrics
