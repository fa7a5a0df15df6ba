// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace levelscore {

// The five ITU text rating levels, ordered worst to best.
enum class RatingLevel : int { Bad = 1, Poor = 2, Fair = 3, Good = 4, Excellent = 5 };

inline constexpr int kLevelCount = 5;

inline constexpr std::array<RatingLevel, kLevelCount> kLevels = {
    RatingLevel::Bad, RatingLevel::Poor, RatingLevel::Fair, RatingLevel::Good,
    RatingLevel::Excellent};

constexpr int ordinal(RatingLevel level) noexcept { return static_cast<int>(level); }

std::string_view label(RatingLevel level) noexcept;
RatingLevel level_from_ordinal(int ordinal);
std::optional<RatingLevel> level_from_label(std::string_view text);

// Numeric value each level takes when ratings are averaged into a score.
// The canonical scale assigns bad..excellent the values 1..5.
class LevelScale {
 public:
  explicit LevelScale(const std::array<double, kLevelCount>& values);

  static const LevelScale& canonical();

  double value(RatingLevel level) const noexcept {
    return values_[static_cast<std::size_t>(ordinal(level) - 1)];
  }

 private:
  std::array<double, kLevelCount> values_;
};

// Score bounds of a dataset's rating scale.
struct ScoreRange {
  double min = 1.0;
  double max = 5.0;

  double width() const noexcept { return max - min; }
};

inline constexpr ScoreRange kCanonicalRange{1.0, 5.0};

void check_range(const ScoreRange& range);

struct ScoredItem {
  std::string id;
  double score = 0.0;
};

// Equidistant partition of [range.min, range.max] into the five levels.
// Interval i is (min + (i-1)/5 * width, min + i/5 * width]; the bottom edge
// itself belongs to the first interval so every in-range score has a level.
RatingLevel score_to_level(double score, const ScoreRange& range);

double level_value(RatingLevel level, const LevelScale& scale = LevelScale::canonical());

struct FidelityResult {
  double srcc = 0.0;
  double plcc = 0.0;
};

// Correlation between original scores and the values they keep after being
// quantized through score_to_level, i.e. how much precision the level
// conversion preserves.
FidelityResult conversion_fidelity(std::span<const ScoredItem> items, const ScoreRange& range);

}  // namespace levelscore
