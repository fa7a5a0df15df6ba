// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "levelscore/levels.hpp"

namespace levelscore::data {

enum class TaskKind { IQA, IAA, VQA };

std::string_view task_name(TaskKind task) noexcept;  // "iqa" / "iaa" / "vqa"
std::optional<TaskKind> task_from_name(std::string_view name);

struct AnnotatedItem {
  std::string id;
  std::string media_uri;
  double mos = 0.0;
  std::optional<double> duration_seconds;  // required for VQA items
  // Stamped from the source manifest so items from mixed datasets keep their
  // own task template and level partition.
  TaskKind task = TaskKind::IQA;
  ScoreRange range = kCanonicalRange;
};

struct DatasetManifest {
  std::string name;
  TaskKind task = TaskKind::IQA;
  ScoreRange range = kCanonicalRange;
  std::vector<AnnotatedItem> items;
};

// Stamps every item with the dataset task/range and validates invariants:
// non-empty item list, scores within range, VQA items carrying a duration.
DatasetManifest make_manifest(std::string name, TaskKind task, ScoreRange range,
                              std::vector<AnnotatedItem> items);

// Throws unless the item satisfies the invariants for its stamped task/range.
void check_item(const AnnotatedItem& item);

struct InstructionPair {
  std::vector<std::string> media_refs;
  std::string user_text;
  std::string assistant_text;
  std::string supervised_span;  // always exactly the assistant text
  RatingLevel level = RatingLevel::Fair;
  TaskKind task = TaskKind::IQA;
  std::string source_id;
};

struct ItemError {
  std::string id;
  std::string message;
};

struct CompileOutput {
  std::vector<InstructionPair> pairs;  // input order, failed items skipped
  std::vector<ItemError> errors;
};

inline constexpr int kParaphrasesPerTask = 8;
inline constexpr std::string_view kParaphrasePoolVersion = "v1";

// Frozen query pool per task; index 0 is the task's canonical phrasing.
std::span<const std::string_view> paraphrase_pool(TaskKind task);

std::string assistant_response(TaskKind task, RatingLevel level);

// Recovers the level label embedded in a response; nullopt unless exactly
// one level label occurs.
std::optional<RatingLevel> parse_response_level(std::string_view response);

// Media slots for an item: the single image, or one planned frame reference
// per second of video ("uri#t=N").
std::vector<std::string> media_refs_for_item(const AnnotatedItem& item);

// One instruction-response pair per item. The user query is drawn from the
// task's paraphrase pool (one seeded draw per item, consumed even when the
// item fails so the selection never depends on prior failures); the
// assistant response embeds the item's converted rating level.
CompileOutput compile_pairs(const DatasetManifest& manifest, uint64_t seed);

// Concatenation; ids get "<dataset>/" prefixes and every item keeps its own
// task and score range.
DatasetManifest mix_datasets(std::span<const DatasetManifest> manifests);

// Uniform sample without replacement of ceil(fraction * N) items, keeping
// the original item order. Deterministic given the seed.
DatasetManifest subsample_fewshot(const DatasetManifest& manifest, double fraction,
                                  uint64_t seed);

inline constexpr int kTokensPerFrame = 64;
inline constexpr int kMaxFramesInContext = 30;
inline constexpr int kDefaultContextTokens = 2048;
// Context headroom reserved for the conversation text around the frames.
inline constexpr int kTextTokenAllowance = 128;

struct FramePlan {
  std::vector<double> timestamps_seconds;  // 0, 1, 2, ...
  int frame_count = 0;
  int token_count = 0;  // kTokensPerFrame * frame_count
  bool fits_context = false;
};

// One-frame-per-second sampling plan: max(1, floor(duration)) frames. The
// plan fits when the frame count stays within kMaxFramesInContext and the
// frame tokens leave kTextTokenAllowance of the context free.
FramePlan plan_frames(double duration_seconds, int context_limit = kDefaultContextTokens);

}  // namespace levelscore::data
