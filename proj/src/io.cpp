// SPDX-License-Identifier: Apache-2.0
#include "levelscore/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace levelscore::io {

namespace {

using nlohmann::json;

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream file(path);
  if (!file) {
    throw std::runtime_error("cannot open file: " + path);
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(file, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string trim(const std::string& text) {
  const std::size_t first = text.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const std::size_t last = text.find_last_not_of(" \t");
  return text.substr(first, last - first + 1);
}

struct ManifestMeta {
  std::string name;
  data::TaskKind task = data::TaskKind::IQA;
  ScoreRange range = kCanonicalRange;
};

void apply_task(ManifestMeta& meta, const std::string& value, const std::string& path) {
  const auto task = data::task_from_name(value);
  if (!task) throw std::runtime_error(path + ": unknown task '" + value + "'");
  meta.task = *task;
}

data::AnnotatedItem item_from_json(const json& object) {
  data::AnnotatedItem item;
  item.id = object.at("id").get<std::string>();
  item.media_uri = object.at("media_uri").get<std::string>();
  item.mos = object.at("mos").get<double>();
  if (object.contains("duration_seconds") && !object.at("duration_seconds").is_null()) {
    item.duration_seconds = object.at("duration_seconds").get<double>();
  }
  return item;
}

ManifestLoad load_manifest_jsonl(const std::vector<std::string>& lines, ManifestMeta meta,
                                 const std::string& path) {
  ManifestLoad load;
  std::vector<data::AnnotatedItem> items;
  bool header_allowed = true;

  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (is_blank(lines[n])) continue;
    json object;
    try {
      object = json::parse(lines[n]);
    } catch (const json::exception& e) {
      load.errors.push_back({"line:" + std::to_string(n + 1), e.what()});
      continue;
    }
    if (header_allowed && object.is_object() && !object.contains("id")) {
      if (object.contains("name")) meta.name = object.at("name").get<std::string>();
      if (object.contains("task")) apply_task(meta, object.at("task").get<std::string>(), path);
      if (object.contains("range")) {
        meta.range = ScoreRange{object.at("range").at(0).get<double>(),
                                object.at("range").at(1).get<double>()};
      }
      header_allowed = false;
      continue;
    }
    header_allowed = false;
    try {
      items.push_back(item_from_json(object));
    } catch (const json::exception& e) {
      std::string id = object.is_object() && object.contains("id") && object["id"].is_string()
                           ? object["id"].get<std::string>()
                           : "line:" + std::to_string(n + 1);
      load.errors.push_back({id, e.what()});
    }
  }

  check_range(meta.range);
  load.manifest.name = meta.name;
  load.manifest.task = meta.task;
  load.manifest.range = meta.range;
  for (data::AnnotatedItem& item : items) {
    item.task = meta.task;
    item.range = meta.range;
    try {
      data::check_item(item);
      load.manifest.items.push_back(std::move(item));
    } catch (const std::exception& e) {
      load.errors.push_back({item.id, e.what()});
    }
  }
  return load;
}

ManifestLoad load_manifest_tabular(const std::vector<std::string>& lines, ManifestMeta meta,
                                   const std::string& path) {
  ManifestLoad load;
  std::size_t row = 0;

  // Pragma lines: "# key=value"
  for (; row < lines.size(); ++row) {
    if (is_blank(lines[row])) continue;
    if (lines[row][0] != '#') break;
    const std::string body = trim(lines[row].substr(1));
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key == "name") {
      meta.name = value;
    } else if (key == "task") {
      apply_task(meta, value, path);
    } else if (key == "range") {
      const auto parts = split(value, ',');
      if (parts.size() != 2) throw std::runtime_error(path + ": range pragma needs min,max");
      meta.range = ScoreRange{parse_double(trim(parts[0])), parse_double(trim(parts[1]))};
    } else {
      throw std::runtime_error(path + ": unknown pragma '" + key + "'");
    }
  }
  if (row >= lines.size()) {
    throw std::runtime_error(path + ": tabular manifest has no header row");
  }

  const char sep = lines[row].find('\t') != std::string::npos ? '\t' : ',';
  const auto header = split(lines[row], sep);
  int col_id = -1, col_uri = -1, col_mos = -1, col_duration = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == "id") col_id = static_cast<int>(c);
    if (name == "media_uri") col_uri = static_cast<int>(c);
    if (name == "mos") col_mos = static_cast<int>(c);
    if (name == "duration_seconds") col_duration = static_cast<int>(c);
  }
  if (col_id < 0 || col_uri < 0 || col_mos < 0) {
    throw std::runtime_error(path + ": header row must name id, media_uri and mos columns");
  }
  ++row;

  check_range(meta.range);
  load.manifest.name = meta.name;
  load.manifest.task = meta.task;
  load.manifest.range = meta.range;

  for (; row < lines.size(); ++row) {
    if (is_blank(lines[row])) continue;
    const auto fields = split(lines[row], sep);
    const std::string line_id = "line:" + std::to_string(row + 1);
    if (fields.size() < header.size()) {
      load.errors.push_back({line_id, "expected " + std::to_string(header.size()) + " fields"});
      continue;
    }
    data::AnnotatedItem item;
    item.task = meta.task;
    item.range = meta.range;
    try {
      item.id = trim(fields[static_cast<std::size_t>(col_id)]);
      item.media_uri = trim(fields[static_cast<std::size_t>(col_uri)]);
      item.mos = parse_double(trim(fields[static_cast<std::size_t>(col_mos)]));
      if (col_duration >= 0) {
        const std::string d = trim(fields[static_cast<std::size_t>(col_duration)]);
        if (!d.empty()) item.duration_seconds = parse_double(d);
      }
      data::check_item(item);
      load.manifest.items.push_back(std::move(item));
    } catch (const std::exception& e) {
      load.errors.push_back({item.id.empty() ? line_id : item.id, e.what()});
    }
  }
  return load;
}

}  // namespace

ManifestLoad load_manifest(const std::string& path) {
  const auto lines = read_lines(path);
  ManifestMeta meta;
  meta.name = std::filesystem::path(path).stem().string();

  for (const std::string& line : lines) {
    if (is_blank(line)) continue;
    if (line[0] == '{') return load_manifest_jsonl(lines, meta, path);
    return load_manifest_tabular(lines, meta, path);
  }
  // Nothing but blank lines: an empty manifest with defaults.
  ManifestLoad load;
  load.manifest.name = meta.name;
  return load;
}

LevelLogits logits_from_json(const nlohmann::json& object) {
  if (!object.is_object()) {
    throw std::runtime_error("logits must be an object with the five level labels");
  }
  LevelLogits logits;
  for (RatingLevel level : kLevels) {
    const std::string key(label(level));
    if (!object.contains(key) || !object.at(key).is_number()) {
      throw std::runtime_error("logits record is missing level '" + key + "'");
    }
    const double value = object.at(key).get<double>();
    if (!std::isfinite(value)) {
      throw std::runtime_error("logit for level '" + key + "' is not finite");
    }
    logits.set(level, value);
  }
  return logits;
}

std::unordered_map<std::string, LevelLogits> load_replay(const std::string& path) {
  const auto lines = read_lines(path);
  std::unordered_map<std::string, LevelLogits> replay;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (is_blank(lines[n])) continue;
    const std::string where = path + ":" + std::to_string(n + 1);
    json object;
    try {
      object = json::parse(lines[n]);
    } catch (const json::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
    if (!object.contains("id") || !object["id"].is_string() || !object.contains("logits")) {
      throw std::runtime_error(where + ": replay records need an id and a logits object");
    }
    const std::string id = object["id"].get<std::string>();
    try {
      if (!replay.emplace(id, logits_from_json(object["logits"])).second) {
        throw std::runtime_error("duplicate id '" + id + "'");
      }
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return replay;
}

std::vector<ScoreRecord> load_scores(const std::string& path) {
  const auto lines = read_lines(path);
  std::vector<ScoreRecord> records;
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (is_blank(lines[n])) continue;
    const std::string where = path + ":" + std::to_string(n + 1);
    try {
      const json object = json::parse(lines[n]);
      ScoreRecord record;
      record.id = object.at("id").get<std::string>();
      record.score = object.at("score").get<double>();
      if (!std::isfinite(record.score)) throw std::runtime_error("score is not finite");
      records.push_back(std::move(record));
    } catch (const json::exception& e) {
      throw std::runtime_error(where + ": " + e.what());
    }
  }
  return records;
}

nlohmann::json pair_record(const data::InstructionPair& pair) {
  return json{{"task", std::string(data::task_name(pair.task))},
              {"source_id", pair.source_id},
              {"media_refs", pair.media_refs},
              {"user_text", pair.user_text},
              {"assistant_text", pair.assistant_text},
              {"supervised_span", pair.supervised_span},
              {"level", std::string(label(pair.level))}};
}

nlohmann::json decoded_record(const std::string& id, const DecodedScore& decoded,
                              double score_native) {
  json probabilities;
  for (RatingLevel level : kLevels) {
    probabilities[std::string(label(level))] = decoded.probabilities.probability(level);
  }
  return json{{"id", id},
              {"score", decoded.score},
              {"score_native", score_native},
              {"probabilities", probabilities},
              {"top", std::string(label(decoded.top))},
              {"second", std::string(label(decoded.second))},
              {"adjacent", decoded.adjacent}};
}

nlohmann::json panel_record(int panel_index, const sim::PanelConfig& config,
                            const sim::PanelOutcome& outcome, bool include_ratings) {
  json record{{"panel", panel_index},
              {"mode", config.mode == sim::RaterMode::LevelChoice ? "level" : "slider"},
              {"raters", config.rater_count},
              {"true_score", config.true_score},
              {"noise_scale", config.noise_scale},
              {"seed", config.seed},
              {"mos", outcome.result.mos}};
  if (outcome.result.frequencies.has_value()) {
    json frequencies;
    for (RatingLevel level : kLevels) {
      frequencies[std::string(label(level))] =
          (*outcome.result.frequencies)[static_cast<std::size_t>(ordinal(level) - 1)];
    }
    record["frequencies"] = frequencies;
  } else {
    record["frequencies"] = nullptr;
  }
  if (include_ratings) {
    json ratings = json::array();
    for (const sim::RatingRecord& rating : outcome.ratings) {
      if (std::holds_alternative<RatingLevel>(rating)) {
        ratings.push_back(std::string(label(std::get<RatingLevel>(rating))));
      } else {
        ratings.push_back(std::get<double>(rating));
      }
    }
    record["ratings"] = ratings;
  }
  return record;
}

nlohmann::json frame_plan_record(const data::FramePlan& plan, double duration_seconds) {
  return json{{"duration_seconds", duration_seconds},
              {"frame_count", plan.frame_count},
              {"token_count", plan.token_count},
              {"fits_context", plan.fits_context},
              {"timestamps_seconds", plan.timestamps_seconds}};
}

void write_lines(std::ostream& out, std::span<const nlohmann::json> records) {
  for (const json& record : records) {
    out << record.dump() << "\n";
  }
}

std::string to_jsonl(std::span<const nlohmann::json> records) {
  std::ostringstream out;
  write_lines(out, records);
  return out.str();
}

}  // namespace levelscore::io
