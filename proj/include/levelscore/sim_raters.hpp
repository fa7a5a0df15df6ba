// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "levelscore/decode.hpp"
#include "levelscore/levels.hpp"

namespace levelscore::sim {

// How a simulated rater reports an opinion: by choosing one of the five
// levels, or by positioning a level-guided slider on the continuous scale.
enum class RaterMode { LevelChoice, Slider };

struct PanelConfig {
  int rater_count = 1;
  RaterMode mode = RaterMode::LevelChoice;
  double true_score = 3.0;  // canonical [1,5]
  double noise_scale = 0.0;
  uint64_t seed = 0;
};

// One rater's initial rating: a chosen level, or a slider value in [1,5].
using RatingRecord = std::variant<RatingLevel, double>;

struct PanelResult {
  // Fraction of raters choosing each level; level-choice panels only.
  std::optional<std::array<double, kLevelCount>> frequencies;
  double mos = 0.0;
};

struct PanelOutcome {
  std::vector<RatingRecord> ratings;
  PanelResult result;
};

// Each rater perturbs the true score with seeded Gaussian noise, clamps the
// latent value to [1,5], and reports it per the panel mode. Level-choice
// panels aggregate to MOS via frequency-weighted level values; slider panels
// via the plain mean. Deterministic given the seed.
PanelOutcome simulate_panel(const PanelConfig& config);

// Exact inverse of the level-choice aggregation: log-frequency logits whose
// close-set softmax reproduces the panel frequencies. Zero-frequency levels
// become inactive so they keep probability exactly zero.
LevelLogits frequencies_to_logits(const PanelResult& result);

}  // namespace levelscore::sim
