// SPDX-License-Identifier: Apache-2.0
#include "levelscore/sim_raters.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levelscore/rng.hpp"

namespace levelscore::sim {

namespace {

void check_config(const PanelConfig& config) {
  if (config.rater_count < 1) {
    throw std::invalid_argument("panel needs at least one rater");
  }
  if (!std::isfinite(config.noise_scale) || config.noise_scale < 0.0) {
    throw std::invalid_argument("noise scale must be finite and non-negative");
  }
  if (!std::isfinite(config.true_score) || config.true_score < kCanonicalRange.min ||
      config.true_score > kCanonicalRange.max) {
    throw std::invalid_argument("true score must lie in [1,5]");
  }
}

}  // namespace

PanelOutcome simulate_panel(const PanelConfig& config) {
  check_config(config);
  SeededRng rng(config.seed);

  PanelOutcome outcome;
  outcome.ratings.reserve(static_cast<std::size_t>(config.rater_count));

  std::array<int, kLevelCount> counts{};
  double slider_sum = 0.0;

  for (int r = 0; r < config.rater_count; ++r) {
    double latent = config.true_score + config.noise_scale * rng.gaussian();
    latent = std::clamp(latent, kCanonicalRange.min, kCanonicalRange.max);
    if (config.mode == RaterMode::LevelChoice) {
      const RatingLevel level = score_to_level(latent, kCanonicalRange);
      counts[static_cast<std::size_t>(ordinal(level) - 1)] += 1;
      outcome.ratings.emplace_back(level);
    } else {
      slider_sum += latent;
      outcome.ratings.emplace_back(latent);
    }
  }

  if (config.mode == RaterMode::LevelChoice) {
    std::array<double, kLevelCount> frequencies{};
    double mos = 0.0;
    for (int i = 0; i < kLevelCount; ++i) {
      frequencies[static_cast<std::size_t>(i)] =
          static_cast<double>(counts[static_cast<std::size_t>(i)]) /
          static_cast<double>(config.rater_count);
      mos += frequencies[static_cast<std::size_t>(i)] *
             LevelScale::canonical().value(static_cast<RatingLevel>(i + 1));
    }
    outcome.result.frequencies = frequencies;
    outcome.result.mos = mos;
  } else {
    outcome.result.frequencies = std::nullopt;
    outcome.result.mos = slider_sum / static_cast<double>(config.rater_count);
  }
  return outcome;
}

LevelLogits frequencies_to_logits(const PanelResult& result) {
  if (!result.frequencies.has_value()) {
    throw std::invalid_argument("frequencies_to_logits needs a level-choice panel result");
  }
  const auto& frequencies = *result.frequencies;
  LevelLogits logits;
  bool any_active = false;
  for (RatingLevel level : kLevels) {
    const double f = frequencies[static_cast<std::size_t>(ordinal(level) - 1)];
    if (f > 0.0) {
      logits.set(level, std::log(f));
      any_active = true;
    } else {
      logits.deactivate(level);
    }
  }
  if (!any_active) {
    throw std::invalid_argument("panel frequencies are all zero");
  }
  return logits;
}

}  // namespace levelscore::sim
