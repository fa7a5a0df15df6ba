// SPDX-License-Identifier: Apache-2.0
#include "levelscore/sim_raters.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "levelscore/rng.hpp"

namespace levelscore::sim {
namespace {

TEST(SimulatePanelTest, ZeroNoiseOnLevelValueIsExact) {
  const PanelConfig config{.rater_count = 100,
                           .mode = RaterMode::LevelChoice,
                           .true_score = 4.0,
                           .noise_scale = 0.0,
                           .seed = 1};
  const PanelOutcome outcome = simulate_panel(config);
  ASSERT_EQ(outcome.ratings.size(), 100u);
  for (const RatingRecord& rating : outcome.ratings) {
    EXPECT_EQ(std::get<RatingLevel>(rating), RatingLevel::Good);
  }
  ASSERT_TRUE(outcome.result.frequencies.has_value());
  EXPECT_DOUBLE_EQ((*outcome.result.frequencies)[3], 1.0);
  EXPECT_DOUBLE_EQ(outcome.result.mos, 4.0);
}

TEST(SimulatePanelTest, ZeroNoiseFixedPointOnEveryLevelValue) {
  for (int v = 1; v <= 5; ++v) {
    const PanelConfig config{.rater_count = 7,
                             .mode = RaterMode::LevelChoice,
                             .true_score = static_cast<double>(v),
                             .noise_scale = 0.0,
                             .seed = 3};
    EXPECT_DOUBLE_EQ(simulate_panel(config).result.mos, static_cast<double>(v));
  }
}

TEST(SimulatePanelTest, FrequenciesSumToOneAndMosStaysInRange) {
  SeededRng seeds(95);
  for (int trial = 0; trial < 100; ++trial) {
    const PanelConfig config{.rater_count = 1 + static_cast<int>(seeds.below(40)),
                             .mode = RaterMode::LevelChoice,
                             .true_score = seeds.uniform(1, 5),
                             .noise_scale = seeds.uniform(0, 2),
                             .seed = seeds.next_u64()};
    const PanelOutcome outcome = simulate_panel(config);
    double sum = 0.0;
    for (double f : *outcome.result.frequencies) sum += f;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_GE(outcome.result.mos, 1.0);
    EXPECT_LE(outcome.result.mos, 5.0);
  }
}

TEST(SimulatePanelTest, SliderRatingsAreClampedMeans) {
  const PanelConfig config{.rater_count = 500,
                           .mode = RaterMode::Slider,
                           .true_score = 4.8,
                           .noise_scale = 2.0,
                           .seed = 17};
  const PanelOutcome outcome = simulate_panel(config);
  EXPECT_FALSE(outcome.result.frequencies.has_value());
  double sum = 0.0;
  for (const RatingRecord& rating : outcome.ratings) {
    const double value = std::get<double>(rating);
    EXPECT_GE(value, 1.0);
    EXPECT_LE(value, 5.0);
    sum += value;
  }
  EXPECT_NEAR(outcome.result.mos, sum / 500.0, 1e-12);
}

TEST(SimulatePanelTest, DeterministicGivenSeed) {
  const PanelConfig config{.rater_count = 50,
                           .mode = RaterMode::LevelChoice,
                           .true_score = 2.7,
                           .noise_scale = 0.6,
                           .seed = 4242};
  const PanelOutcome a = simulate_panel(config);
  const PanelOutcome b = simulate_panel(config);
  EXPECT_EQ(a.ratings, b.ratings);
  EXPECT_DOUBLE_EQ(a.result.mos, b.result.mos);

  PanelConfig other = config;
  other.seed = 4243;
  EXPECT_NE(simulate_panel(other).ratings, a.ratings);
}

TEST(SimulatePanelTest, SliderMeanObeysLawOfLargeNumbers) {
  // |mos - true| <= 3*noise/sqrt(n) should hold for ~99.7% of seeds; demand
  // at least 99% over 300 panels kept away from the clamp boundaries.
  SeededRng seeds(2024);
  int failures = 0;
  const int trials = 300;
  for (int trial = 0; trial < trials; ++trial) {
    const double noise = seeds.uniform(0.05, 0.5);
    const PanelConfig config{.rater_count = 25 + static_cast<int>(seeds.below(375)),
                             .mode = RaterMode::Slider,
                             .true_score = seeds.uniform(1.0 + 4 * noise, 5.0 - 4 * noise),
                             .noise_scale = noise,
                             .seed = seeds.next_u64()};
    const PanelOutcome outcome = simulate_panel(config);
    const double bound = 3.0 * noise / std::sqrt(static_cast<double>(config.rater_count));
    if (std::abs(outcome.result.mos - config.true_score) > bound) ++failures;
  }
  EXPECT_LE(failures, trials / 100);
}

TEST(SimulatePanelTest, RejectsInvalidConfigs) {
  EXPECT_THROW(simulate_panel(PanelConfig{.rater_count = 0}), std::invalid_argument);
  EXPECT_THROW(simulate_panel(PanelConfig{.rater_count = 3, .noise_scale = -0.1}),
               std::invalid_argument);
  EXPECT_THROW(simulate_panel(PanelConfig{.rater_count = 3, .true_score = 5.5}),
               std::invalid_argument);
}

TEST(FrequenciesToLogitsTest, UniformFrequenciesDecodeToMidpoint) {
  PanelResult result;
  result.frequencies = {0.2, 0.2, 0.2, 0.2, 0.2};
  result.mos = 3.0;
  EXPECT_NEAR(decode(frequencies_to_logits(result)).score, 3.0, 1e-12);
}

TEST(FrequenciesToLogitsTest, DegenerateFrequencyDecodesExactly) {
  PanelResult result;
  result.frequencies = {0, 0, 0, 1.0, 0};
  result.mos = 4.0;
  const DecodedScore decoded = decode(frequencies_to_logits(result));
  EXPECT_DOUBLE_EQ(decoded.score, 4.0);
  EXPECT_DOUBLE_EQ(decoded.probabilities.probability(RatingLevel::Good), 1.0);
  EXPECT_EQ(decoded.probabilities.probability(RatingLevel::Bad), 0.0);
}

TEST(FrequenciesToLogitsTest, HalfGoodHalfFair) {
  PanelResult result;
  result.frequencies = {0, 0, 0.5, 0.5, 0};
  result.mos = 3.5;
  EXPECT_NEAR(decode(frequencies_to_logits(result)).score, 3.5, 1e-12);
}

TEST(FrequenciesToLogitsTest, RoundTripReproducesPanelMos) {
  SeededRng seeds(31337);
  for (int trial = 0; trial < 300; ++trial) {
    const PanelConfig config{.rater_count = 1 + static_cast<int>(seeds.below(500)),
                             .mode = RaterMode::LevelChoice,
                             .true_score = seeds.uniform(1, 5),
                             .noise_scale = seeds.uniform(0, 1),
                             .seed = seeds.next_u64()};
    const PanelOutcome outcome = simulate_panel(config);
    const double decoded = decode(frequencies_to_logits(outcome.result)).score;
    EXPECT_NEAR(decoded, outcome.result.mos, 1e-9);
  }
}

TEST(FrequenciesToLogitsTest, GoldenProbabilitiesActAsPanelFrequencies) {
  // Close-set probabilities of a real logit row, treated as the frequencies
  // of a (huge) panel: the aggregate matches the decoder's score exactly.
  const LevelProbabilities probs =
      closeset_softmax(LevelLogits::of(9.477, 11.60, 14.63, 18.38, 18.03));
  PanelResult result;
  result.frequencies = probs.values();
  result.mos = expected_score(probs);
  EXPECT_NEAR(result.mos, 4.3926, 2e-3);
  EXPECT_NEAR(decode(frequencies_to_logits(result)).score, result.mos, 1e-9);
}

TEST(FrequenciesToLogitsTest, RejectsSliderResults) {
  PanelResult result;
  result.frequencies = std::nullopt;
  result.mos = 2.0;
  EXPECT_THROW(frequencies_to_logits(result), std::invalid_argument);
}

}  // namespace
}  // namespace levelscore::sim
