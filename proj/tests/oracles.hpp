// SPDX-License-Identifier: Apache-2.0
#pragma once

// Brute-force reference implementations kept deliberately independent of the
// library: ranks by O(n^2) counting instead of sorting, Pearson by the
// raw-moment formula instead of centered accumulation.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline std::vector<double> counting_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t below = 0;
    std::size_t equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (values[j] < values[i]) ++below;
      if (values[j] == values[i]) ++equal;
    }
    ranks[i] = static_cast<double>(below) + 1.0 + (static_cast<double>(equal) - 1.0) * 0.5;
  }
  return ranks;
}

inline double pearson_raw(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sum_a = 0, sum_b = 0, sum_ab = 0, sum_aa = 0, sum_bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sum_a += a[i];
    sum_b += b[i];
    sum_ab += a[i] * b[i];
    sum_aa += a[i] * a[i];
    sum_bb += b[i] * b[i];
  }
  return (n * sum_ab - sum_a * sum_b) /
         std::sqrt((n * sum_aa - sum_a * sum_a) * (n * sum_bb - sum_b * sum_b));
}

inline double spearman_brute(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson_raw(counting_ranks(a), counting_ranks(b));
}

}  // namespace oracle
