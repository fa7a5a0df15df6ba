// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "levelscore/data_compiler.hpp"
#include "levelscore/decode.hpp"
#include "levelscore/sim_raters.hpp"

namespace levelscore::io {

// --- dataset manifests ------------------------------------------------------
//
// JSONL form: an optional first header object (no "id" field)
//   {"name":"koniq","task":"iqa","range":[1.0,5.0]}
// followed by one item object per line
//   {"id":"img1","media_uri":"images/img1.jpg","mos":3.4}
//   {"id":"vid1","media_uri":"v.mp4","mos":62.0,"duration_seconds":12.0}
//
// Tabular form: optional "# key=value" pragma lines (name, task,
// range=min,max), then a header row naming the columns id, media_uri, mos
// and optionally duration_seconds, tab- or comma-separated, then data rows.
//
// Defaults when unspecified: name = file stem, task = iqa, range = [1,5].

struct ManifestLoad {
  data::DatasetManifest manifest;      // valid items only; may be empty
  std::vector<data::ItemError> errors; // items that failed validation or parsing
};

ManifestLoad load_manifest(const std::string& path);

// --- logit replay files -----------------------------------------------------
//
// One record per line: {"id":"x","logits":{"bad":9.5,"poor":11.6,"fair":14.6,
// "good":18.4,"excellent":18.0}}. Unknown extra fields are ignored; a record
// missing any of the five levels is malformed and rejects the whole file.

std::unordered_map<std::string, LevelLogits> load_replay(const std::string& path);

// Parses a {"bad":...,...,"excellent":...} object; throws std::runtime_error
// unless all five levels are present and finite.
LevelLogits logits_from_json(const nlohmann::json& object);

// --- score records ----------------------------------------------------------
//
// Any line-delimited records carrying at least {"id": "...", "score": n};
// extra fields (probabilities, diagnostics) are ignored on load.

struct ScoreRecord {
  std::string id;
  double score = 0.0;
};

std::vector<ScoreRecord> load_scores(const std::string& path);

// --- record builders ---------------------------------------------------------

nlohmann::json pair_record(const data::InstructionPair& pair);

nlohmann::json decoded_record(const std::string& id, const DecodedScore& decoded,
                              double score_native);

nlohmann::json panel_record(int panel_index, const sim::PanelConfig& config,
                            const sim::PanelOutcome& outcome, bool include_ratings);

nlohmann::json frame_plan_record(const data::FramePlan& plan, double duration_seconds);

void write_lines(std::ostream& out, std::span<const nlohmann::json> records);
std::string to_jsonl(std::span<const nlohmann::json> records);

}  // namespace levelscore::io
