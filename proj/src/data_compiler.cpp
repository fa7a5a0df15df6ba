// SPDX-License-Identifier: Apache-2.0
#include "levelscore/data_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "levelscore/rng.hpp"

namespace levelscore::data {

namespace {

constexpr std::array<std::string_view, kParaphrasesPerTask> kIqaQueries = {
    "Can you evaluate the quality of the image?",
    "How is the quality of the image?",
    "Rate the quality of the image.",
    "How would you rate the quality of the image?",
    "Can you judge the quality of the image?",
    "How do you assess the quality of the image?",
    "What do you think about the quality of the image?",
    "Please evaluate the quality of the image.",
};

constexpr std::array<std::string_view, kParaphrasesPerTask> kIaaQueries = {
    "How is the aesthetics of the image?",
    "Can you evaluate the aesthetics of the image?",
    "Rate the aesthetics of the image.",
    "How would you rate the aesthetics of the image?",
    "Can you judge the aesthetics of the image?",
    "How do you assess the aesthetics of the image?",
    "What do you think about the aesthetics of the image?",
    "Please evaluate the aesthetics of the image.",
};

constexpr std::array<std::string_view, kParaphrasesPerTask> kVqaQueries = {
    "Rate the quality of the video.",
    "Can you evaluate the quality of the video?",
    "How is the quality of the video?",
    "How would you rate the quality of the video?",
    "Can you judge the quality of the video?",
    "How do you assess the quality of the video?",
    "What do you think about the quality of the video?",
    "Please evaluate the quality of the video.",
};

std::string_view response_prefix(TaskKind task) {
  switch (task) {
    case TaskKind::IQA:
      return "The quality of the image is ";
    case TaskKind::IAA:
      return "The aesthetics of the image is ";
    case TaskKind::VQA:
      return "The quality of the video is ";
  }
  throw std::invalid_argument("unknown task");
}

}  // namespace

void check_item(const AnnotatedItem& item) {
  if (item.id.empty()) throw std::invalid_argument("item id must not be empty");
  if (!std::isfinite(item.mos)) {
    throw std::invalid_argument("item '" + item.id + "' has non-finite mos");
  }
  if (item.mos < item.range.min || item.mos > item.range.max) {
    throw std::out_of_range("item '" + item.id + "' has mos outside its score range");
  }
  if (item.task == TaskKind::VQA) {
    if (!item.duration_seconds.has_value() || !(*item.duration_seconds > 0.0) ||
        !std::isfinite(*item.duration_seconds)) {
      throw std::invalid_argument("item '" + item.id + "' needs a positive duration");
    }
  }
}

std::string_view task_name(TaskKind task) noexcept {
  switch (task) {
    case TaskKind::IQA:
      return "iqa";
    case TaskKind::IAA:
      return "iaa";
    case TaskKind::VQA:
      return "vqa";
  }
  return "iqa";
}

std::optional<TaskKind> task_from_name(std::string_view name) {
  if (name == "iqa") return TaskKind::IQA;
  if (name == "iaa") return TaskKind::IAA;
  if (name == "vqa") return TaskKind::VQA;
  return std::nullopt;
}

DatasetManifest make_manifest(std::string name, TaskKind task, ScoreRange range,
                              std::vector<AnnotatedItem> items) {
  check_range(range);
  if (name.empty()) throw std::invalid_argument("manifest name must not be empty");
  if (items.empty()) throw std::invalid_argument("manifest '" + name + "' has no items");

  DatasetManifest manifest{std::move(name), task, range, std::move(items)};
  for (AnnotatedItem& item : manifest.items) {
    item.task = task;
    item.range = range;
    check_item(item);
  }
  return manifest;
}

std::span<const std::string_view> paraphrase_pool(TaskKind task) {
  switch (task) {
    case TaskKind::IQA:
      return kIqaQueries;
    case TaskKind::IAA:
      return kIaaQueries;
    case TaskKind::VQA:
      return kVqaQueries;
  }
  throw std::invalid_argument("unknown task");
}

std::string assistant_response(TaskKind task, RatingLevel level) {
  std::string text(response_prefix(task));
  text += label(level);
  text += ".";
  return text;
}

std::optional<RatingLevel> parse_response_level(std::string_view response) {
  std::optional<RatingLevel> found;
  for (RatingLevel level : kLevels) {
    if (response.find(label(level)) == std::string_view::npos) continue;
    if (found.has_value()) return std::nullopt;
    found = level;
  }
  return found;
}

std::vector<std::string> media_refs_for_item(const AnnotatedItem& item) {
  if (item.task != TaskKind::VQA || !item.duration_seconds.has_value()) {
    return {item.media_uri};
  }
  const FramePlan plan = plan_frames(*item.duration_seconds);
  std::vector<std::string> refs;
  refs.reserve(plan.timestamps_seconds.size());
  for (double t : plan.timestamps_seconds) {
    refs.push_back(item.media_uri + "#t=" + std::to_string(static_cast<long long>(t)));
  }
  return refs;
}

CompileOutput compile_pairs(const DatasetManifest& manifest, uint64_t seed) {
  SeededRng rng(seed);
  CompileOutput output;
  output.pairs.reserve(manifest.items.size());

  for (const AnnotatedItem& item : manifest.items) {
    const uint64_t paraphrase_index = rng.below(kParaphrasesPerTask);
    try {
      check_item(item);
      InstructionPair pair;
      pair.task = item.task;
      pair.source_id = item.id;
      pair.media_refs = media_refs_for_item(item);
      pair.user_text = std::string(paraphrase_pool(item.task)[paraphrase_index]);
      pair.level = score_to_level(item.mos, item.range);
      pair.assistant_text = assistant_response(item.task, pair.level);
      pair.supervised_span = pair.assistant_text;
      output.pairs.push_back(std::move(pair));
    } catch (const std::exception& e) {
      output.errors.push_back({item.id, e.what()});
    }
  }
  return output;
}

DatasetManifest mix_datasets(std::span<const DatasetManifest> manifests) {
  if (manifests.empty()) {
    throw std::invalid_argument("mix_datasets needs at least one manifest");
  }
  DatasetManifest mixed;
  mixed.task = manifests.front().task;
  mixed.range = manifests.front().range;

  std::size_t total = 0;
  for (const DatasetManifest& m : manifests) total += m.items.size();

  std::unordered_set<std::string> seen;
  seen.reserve(total);
  mixed.items.reserve(total);

  for (std::size_t i = 0; i < manifests.size(); ++i) {
    if (i > 0) mixed.name += "+";
    mixed.name += manifests[i].name;
    for (const AnnotatedItem& item : manifests[i].items) {
      AnnotatedItem copy = item;
      copy.id = manifests[i].name + "/" + item.id;
      if (!seen.insert(copy.id).second) {
        throw std::invalid_argument("duplicate item id after prefixing: " + copy.id);
      }
      mixed.items.push_back(std::move(copy));
    }
  }
  return mixed;
}

DatasetManifest subsample_fewshot(const DatasetManifest& manifest, double fraction,
                                  uint64_t seed) {
  if (!std::isfinite(fraction) || fraction <= 0.0 || fraction > 1.0) {
    throw std::invalid_argument("fewshot fraction must be in (0, 1]");
  }
  const std::size_t n = manifest.items.size();

  // ceil(fraction * n), snapping products that are integers up to rounding
  // (0.2 * 7000 must give 1400, not 1401).
  const double raw = fraction * static_cast<double>(n);
  const double snapped = std::round(raw);
  std::size_t k;
  if (std::abs(raw - snapped) < 1e-9 * std::max(1.0, snapped)) {
    k = static_cast<std::size_t>(snapped);
  } else {
    k = static_cast<std::size_t>(std::ceil(raw));
  }
  k = std::clamp<std::size_t>(k, 1, n);

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  SeededRng rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(n - i);
    std::swap(indices[i], indices[j]);
  }
  indices.resize(k);
  std::sort(indices.begin(), indices.end());

  DatasetManifest sampled;
  sampled.name = manifest.name;
  sampled.task = manifest.task;
  sampled.range = manifest.range;
  sampled.items.reserve(k);
  for (std::size_t idx : indices) sampled.items.push_back(manifest.items[idx]);
  return sampled;
}

FramePlan plan_frames(double duration_seconds, int context_limit) {
  if (!std::isfinite(duration_seconds) || duration_seconds <= 0.0) {
    throw std::invalid_argument("duration must be positive");
  }
  if (duration_seconds > 1e7) {
    throw std::invalid_argument("duration too large to plan");
  }
  if (context_limit <= kTextTokenAllowance) {
    throw std::invalid_argument("context limit leaves no room for media tokens");
  }

  FramePlan plan;
  plan.frame_count = std::max(1, static_cast<int>(std::floor(duration_seconds)));
  plan.token_count = kTokensPerFrame * plan.frame_count;
  plan.fits_context = plan.frame_count <= kMaxFramesInContext &&
                      plan.token_count <= context_limit - kTextTokenAllowance;
  plan.timestamps_seconds.reserve(static_cast<std::size_t>(plan.frame_count));
  for (int i = 0; i < plan.frame_count; ++i) {
    plan.timestamps_seconds.push_back(static_cast<double>(i));
  }
  return plan;
}

}  // namespace levelscore::data
