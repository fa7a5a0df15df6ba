// SPDX-License-Identifier: Apache-2.0
#include "levelscore/decode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace levelscore {

LevelLogits LevelLogits::from_values(const std::array<double, kLevelCount>& values) {
  LevelLogits logits;
  for (int i = 0; i < kLevelCount; ++i) {
    logits.set(static_cast<RatingLevel>(i + 1), values[static_cast<std::size_t>(i)]);
  }
  return logits;
}

LevelLogits LevelLogits::of(double bad, double poor, double fair, double good, double excellent) {
  return from_values({bad, poor, fair, good, excellent});
}

void LevelLogits::set(RatingLevel level, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("logit for level '" + std::string(label(level)) +
                                "' is not finite");
  }
  values_[static_cast<std::size_t>(ordinal(level) - 1)] = value;
}

int LevelLogits::active_count() const noexcept {
  int count = 0;
  for (bool a : active_) count += a ? 1 : 0;
  return count;
}

LevelProbabilities LevelProbabilities::from_values(
    const std::array<double, kLevelCount>& values) {
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("probabilities must be finite and non-negative");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities must sum to 1 (got " + std::to_string(sum) + ")");
  }
  LevelProbabilities probs;
  probs.values_ = values;
  return probs;
}

LevelProbabilities closeset_softmax(const LevelLogits& logits) {
  if (logits.active_count() == 0) {
    throw std::invalid_argument("softmax requires at least one active level");
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (RatingLevel level : kLevels) {
    if (!logits.active(level)) continue;
    const double v = logits.value(level);
    if (!std::isfinite(v)) {
      throw std::invalid_argument("logit for level '" + std::string(label(level)) +
                                  "' is not finite");
    }
    max_logit = std::max(max_logit, v);
  }

  std::array<double, kLevelCount> exps{};
  double sum = 0.0;
  for (RatingLevel level : kLevels) {
    if (!logits.active(level)) continue;
    const double e = std::exp(logits.value(level) - max_logit);
    exps[static_cast<std::size_t>(ordinal(level) - 1)] = e;
    sum += e;
  }

  std::array<double, kLevelCount> probs{};
  for (int i = 0; i < kLevelCount; ++i) {
    probs[static_cast<std::size_t>(i)] = exps[static_cast<std::size_t>(i)] / sum;
  }
  return LevelProbabilities::from_values(probs);
}

double expected_score(const LevelProbabilities& probs, const LevelScale& scale) {
  double score = 0.0;
  for (RatingLevel level : kLevels) {
    score += probs.probability(level) * scale.value(level);
  }
  return score;
}

DecodedScore decode(const LevelLogits& logits, const LevelScale& scale) {
  DecodedScore decoded{.score = 0.0,
                       .probabilities = closeset_softmax(logits),
                       .top = RatingLevel::Bad,
                       .second = RatingLevel::Bad,
                       .adjacent = false};
  // Normalization rounding can land an ulp outside the scale's endpoints.
  decoded.score = std::clamp(expected_score(decoded.probabilities, scale),
                             scale.value(RatingLevel::Bad), scale.value(RatingLevel::Excellent));

  // Scan in ascending ordinal with >= so ties resolve toward the higher
  // ordinal level.
  RatingLevel top = RatingLevel::Bad;
  for (RatingLevel level : kLevels) {
    if (decoded.probabilities.probability(level) >= decoded.probabilities.probability(top)) {
      top = level;
    }
  }
  RatingLevel second = (top == RatingLevel::Bad) ? RatingLevel::Poor : RatingLevel::Bad;
  for (RatingLevel level : kLevels) {
    if (level == top) continue;
    if (decoded.probabilities.probability(level) >= decoded.probabilities.probability(second)) {
      second = level;
    }
  }
  decoded.top = top;
  decoded.second = second;
  decoded.adjacent = std::abs(ordinal(top) - ordinal(second)) == 1;
  return decoded;
}

double binary_softmax_score(double logit_good, double logit_poor) {
  if (!std::isfinite(logit_good) || !std::isfinite(logit_poor)) {
    throw std::invalid_argument("binary softmax logits must be finite");
  }
  const double diff = logit_good - logit_poor;
  if (diff >= 0.0) {
    return 1.0 / (1.0 + std::exp(-diff));
  }
  const double e = std::exp(diff);
  return e / (1.0 + e);
}

double level_cross_entropy(const LevelLogits& logits, RatingLevel target) {
  if (!logits.active(target)) {
    return std::numeric_limits<double>::infinity();
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  for (RatingLevel level : kLevels) {
    if (logits.active(level)) max_logit = std::max(max_logit, logits.value(level));
  }
  double sum = 0.0;
  for (RatingLevel level : kLevels) {
    if (logits.active(level)) sum += std::exp(logits.value(level) - max_logit);
  }
  const double log_prob = logits.value(target) - max_logit - std::log(sum);
  return -log_prob;
}

double rescale_score(double score, const ScoreRange& from, const ScoreRange& to) {
  check_range(from);
  check_range(to);
  if (!std::isfinite(score)) {
    throw std::invalid_argument("score must be finite");
  }
  if (score < from.min || score > from.max) {
    throw std::out_of_range("score outside source range");
  }
  return to.min + (score - from.min) * to.width() / from.width();
}

}  // namespace levelscore
