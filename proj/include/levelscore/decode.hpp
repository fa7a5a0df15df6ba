// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>

#include "levelscore/levels.hpp"

namespace levelscore {

// Per-level token log-probabilities extracted from a language model's output
// distribution. A level may be marked inactive to state "this level has
// probability exactly zero", as happens when logits are built from observed
// frequencies where a level never occurred. Inactive levels are excluded
// from the softmax entirely rather than carrying a placeholder logit.
class LevelLogits {
 public:
  LevelLogits() = default;

  // Values in bad..excellent order, all levels active.
  static LevelLogits from_values(const std::array<double, kLevelCount>& values);
  static LevelLogits of(double bad, double poor, double fair, double good, double excellent);

  double value(RatingLevel level) const noexcept {
    return values_[static_cast<std::size_t>(ordinal(level) - 1)];
  }
  bool active(RatingLevel level) const noexcept {
    return active_[static_cast<std::size_t>(ordinal(level) - 1)];
  }

  void set(RatingLevel level, double value);
  void deactivate(RatingLevel level) noexcept {
    active_[static_cast<std::size_t>(ordinal(level) - 1)] = false;
  }

  int active_count() const noexcept;

 private:
  std::array<double, kLevelCount> values_{};
  std::array<bool, kLevelCount> active_{true, true, true, true, true};
};

class LevelProbabilities {
 public:
  // Validates: every entry >= 0 and finite, entries sum to 1 within 1e-9.
  static LevelProbabilities from_values(const std::array<double, kLevelCount>& values);

  double probability(RatingLevel level) const noexcept {
    return values_[static_cast<std::size_t>(ordinal(level) - 1)];
  }
  const std::array<double, kLevelCount>& values() const noexcept { return values_; }

 private:
  LevelProbabilities() = default;
  std::array<double, kLevelCount> values_{};
};

struct DecodedScore {
  double score = 0.0;
  LevelProbabilities probabilities;
  RatingLevel top = RatingLevel::Fair;
  RatingLevel second = RatingLevel::Fair;
  // Diagnostic only: whether the two most probable levels are neighbours on
  // the ordinal scale.
  bool adjacent = false;
};

// Softmax restricted to the active rating levels. The maximum logit is
// subtracted before exponentiation; inactive levels get probability 0.
LevelProbabilities closeset_softmax(const LevelLogits& logits);

// Probability-weighted average of the level values.
double expected_score(const LevelProbabilities& probs,
                      const LevelScale& scale = LevelScale::canonical());

// closeset_softmax followed by expected_score, with the two most probable
// levels identified (ties break toward the higher ordinal).
DecodedScore decode(const LevelLogits& logits, const LevelScale& scale = LevelScale::canonical());

// Two-level special case: probability of "good" under a softmax over just
// the good/poor logits, i.e. sigmoid(logit_good - logit_poor).
double binary_softmax_score(double logit_good, double logit_poor);

// -log p(target) under closeset_softmax; +infinity if target is inactive.
double level_cross_entropy(const LevelLogits& logits, RatingLevel target);

// Affine map of a score from one range onto another, preserving relative
// position.
double rescale_score(double score, const ScoreRange& from, const ScoreRange& to);

}  // namespace levelscore
