// SPDX-License-Identifier: Apache-2.0
#include "levelscore/levels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levelscore/metrics.hpp"

namespace levelscore {

namespace {

constexpr std::array<std::string_view, kLevelCount> kLabels = {"bad", "poor", "fair", "good",
                                                               "excellent"};

}  // namespace

std::string_view label(RatingLevel level) noexcept {
  return kLabels[static_cast<std::size_t>(ordinal(level) - 1)];
}

RatingLevel level_from_ordinal(int ordinal) {
  if (ordinal < 1 || ordinal > kLevelCount) {
    throw std::invalid_argument("rating level ordinal must be in 1..5, got " +
                                std::to_string(ordinal));
  }
  return static_cast<RatingLevel>(ordinal);
}

std::optional<RatingLevel> level_from_label(std::string_view text) {
  for (int i = 0; i < kLevelCount; ++i) {
    if (text == kLabels[static_cast<std::size_t>(i)]) return static_cast<RatingLevel>(i + 1);
  }
  return std::nullopt;
}

LevelScale::LevelScale(const std::array<double, kLevelCount>& values) : values_(values) {
  for (int i = 0; i < kLevelCount; ++i) {
    if (!std::isfinite(values_[static_cast<std::size_t>(i)])) {
      throw std::invalid_argument("level scale values must be finite");
    }
    if (i > 0 && values_[static_cast<std::size_t>(i)] <= values_[static_cast<std::size_t>(i - 1)]) {
      throw std::invalid_argument("level scale values must be strictly increasing");
    }
  }
}

const LevelScale& LevelScale::canonical() {
  static const LevelScale scale({1.0, 2.0, 3.0, 4.0, 5.0});
  return scale;
}

void check_range(const ScoreRange& range) {
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
    throw std::invalid_argument("score range bounds must be finite");
  }
  if (!(range.min < range.max)) {
    throw std::invalid_argument("score range requires min < max");
  }
}

RatingLevel score_to_level(double score, const ScoreRange& range) {
  check_range(range);
  if (!std::isfinite(score)) {
    throw std::invalid_argument("score must be finite");
  }
  if (score < range.min || score > range.max) {
    std::ostringstream msg;
    msg << "score " << score << " outside range [" << range.min << ", " << range.max << "]";
    throw std::out_of_range(msg.str());
  }
  // Interval edges at min + i*width/5, compared exactly. Only upper edges are
  // tested, so score == min lands in the first interval.
  const double width = range.width();
  for (int i = 1; i < kLevelCount; ++i) {
    if (score <= range.min + static_cast<double>(i) * width / 5.0) {
      return static_cast<RatingLevel>(i);
    }
  }
  return RatingLevel::Excellent;
}

double level_value(RatingLevel level, const LevelScale& scale) { return scale.value(level); }

FidelityResult conversion_fidelity(std::span<const ScoredItem> items, const ScoreRange& range) {
  if (items.size() < 3) {
    throw std::invalid_argument("conversion_fidelity requires at least 3 items");
  }
  metrics::PairedSeries series;
  series.predictions.reserve(items.size());
  series.labels.reserve(items.size());
  for (const ScoredItem& item : items) {
    series.predictions.push_back(level_value(score_to_level(item.score, range)));
    series.labels.push_back(item.score);
  }
  return {metrics::srcc(series), metrics::plcc(series)};
}

}  // namespace levelscore
