// SPDX-License-Identifier: Apache-2.0
#include "levelscore/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "levelscore/io.hpp"
#include "levelscore/logit_provider.hpp"
#include "levelscore/metrics.hpp"
#include "levelscore/rng.hpp"
#include "levelscore/sim_raters.hpp"

namespace levelscore::cli {

namespace {

using nlohmann::json;

void print_item_errors(std::ostream& err, const std::vector<data::ItemError>& errors) {
  for (const data::ItemError& e : errors) {
    err << "error: " << e.id << ": " << e.message << "\n";
  }
}

// Writes records either to the given path or, when the path is empty, to the
// command's stdout stream.
int write_records(const std::string& path, std::ostream& out, std::ostream& err,
                  std::span<const json> records) {
  if (path.empty()) {
    io::write_lines(out, records);
    return 0;
  }
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot write " << path << "\n";
    return 1;
  }
  io::write_lines(file, records);
  return 0;
}

std::string format_metric(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

// Replaces the declared score bounds with the observed min/max of the items.
void use_empirical_range(data::DatasetManifest& manifest) {
  if (manifest.items.empty()) return;
  double lo = manifest.items.front().mos;
  double hi = lo;
  for (const data::AnnotatedItem& item : manifest.items) {
    lo = std::min(lo, item.mos);
    hi = std::max(hi, item.mos);
  }
  if (!(lo < hi)) {
    throw std::domain_error("manifest '" + manifest.name +
                            "' has identical scores; empirical range is undefined");
  }
  manifest.range = ScoreRange{lo, hi};
  for (data::AnnotatedItem& item : manifest.items) item.range = manifest.range;
}

}  // namespace

int run_compile(const CompileOptions& options, std::ostream& out, std::ostream& err) {
  if (options.manifests.empty()) {
    err << "error: no manifest given\n";
    return 1;
  }
  if (options.out.empty()) {
    err << "error: compile requires --out\n";
    return 1;
  }
  if (options.fewshot && !options.mix && options.manifests.size() > 1) {
    err << "error: --fewshot over several manifests requires --mix\n";
    return 1;
  }

  std::vector<data::ItemError> errors;
  std::vector<data::DatasetManifest> manifests;
  try {
    for (const std::string& path : options.manifests) {
      io::ManifestLoad load = io::load_manifest(path);
      for (data::ItemError& e : load.errors) {
        errors.push_back({load.manifest.name + "/" + e.id, e.message});
      }
      if (options.empirical_range) {
        use_empirical_range(load.manifest);
      }
      manifests.push_back(std::move(load.manifest));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<data::InstructionPair> pairs;
  std::map<std::string, std::size_t> per_source;
  try {
    auto compile_one = [&](const data::DatasetManifest& manifest) {
      data::CompileOutput compiled = data::compile_pairs(manifest, options.seed);
      for (const data::InstructionPair& pair : compiled.pairs) {
        const std::size_t slash = pair.source_id.find('/');
        per_source[options.mix && slash != std::string::npos ? pair.source_id.substr(0, slash)
                                                             : manifest.name] += 1;
      }
      std::move(compiled.pairs.begin(), compiled.pairs.end(), std::back_inserter(pairs));
      for (data::ItemError& e : compiled.errors) errors.push_back(std::move(e));
    };
    if (options.mix) {
      data::DatasetManifest mixed = data::mix_datasets(manifests);
      if (options.fewshot) mixed = data::subsample_fewshot(mixed, *options.fewshot, options.seed);
      compile_one(mixed);
    } else {
      for (data::DatasetManifest& manifest : manifests) {
        if (options.fewshot) {
          manifest = data::subsample_fewshot(manifest, *options.fewshot, options.seed);
        }
        compile_one(manifest);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (!errors.empty()) {
    print_item_errors(err, errors);
    if (!options.skip_bad) {
      err << "error: " << errors.size() << " item(s) failed (use --skip-bad to continue)\n";
      return 1;
    }
  }
  if (pairs.empty()) {
    err << "error: no pairs compiled\n";
    return 1;
  }

  std::vector<json> records;
  records.reserve(pairs.size());
  for (const data::InstructionPair& pair : pairs) {
    records.push_back(io::pair_record(pair));
  }
  if (const int status = write_records(options.out, out, err, records); status != 0) {
    return status;
  }

  for (const auto& [source, count] : per_source) {
    out << source << ": " << count << " pairs\n";
  }
  out << "compiled " << pairs.size() << " pairs";
  if (!errors.empty()) out << " (" << errors.size() << " item(s) skipped)";
  out << "\n";
  return 0;
}

int run_decode(const DecodeOptions& options, std::ostream& out, std::ostream& err) {
  if (options.items.empty() || options.out.empty()) {
    err << "error: decode requires --items and --out\n";
    return 1;
  }

  io::ManifestLoad load;
  try {
    load = io::load_manifest(options.items);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  std::vector<data::ItemError> errors = std::move(load.errors);

  std::vector<provider::LogitRequest> requests;
  requests.reserve(load.manifest.items.size());
  for (const data::AnnotatedItem& item : load.manifest.items) {
    requests.push_back(provider::LogitRequest{
        item.id, std::string(data::paraphrase_pool(item.task)[0]),
        data::media_refs_for_item(item)});
  }

  provider::ProviderConfig config;
  try {
    if (options.provider == "replay") {
      if (options.replay.empty()) throw std::invalid_argument("replay provider needs --replay");
      config = provider::ReplayConfig{options.replay};
    } else if (options.provider == "remote") {
      std::string endpoint = options.endpoint;
      if (endpoint.empty()) {
        if (const char* env = std::getenv(kEndpointEnvVar)) endpoint = env;
      }
      if (endpoint.empty()) {
        throw std::invalid_argument(std::string("remote provider needs --endpoint or ") +
                                    kEndpointEnvVar);
      }
      config = provider::RemoteConfig{endpoint, options.timeout_ms, options.max_inflight,
                                      options.retries};
    } else if (options.provider == "mock") {
      provider::MockConfig mock;
      mock.noise_scale = options.noise;
      mock.seed = options.seed;
      for (const data::AnnotatedItem& item : load.manifest.items) {
        mock.target_scores[item.id] = rescale_score(item.mos, item.range, kCanonicalRange);
      }
      config = std::move(mock);
    } else {
      throw std::invalid_argument("unknown provider '" + options.provider + "'");
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<provider::LogitResponse> responses;
  try {
    responses = provider::fetch_logits(config, requests);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<json> records;
  records.reserve(responses.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const provider::LogitResponse& response = responses[i];
    if (!response.ok()) {
      errors.push_back({response.id, response.error});
      continue;
    }
    const DecodedScore decoded = decode(*response.logits);
    const double native =
        rescale_score(decoded.score, kCanonicalRange, load.manifest.items[i].range);
    records.push_back(io::decoded_record(response.id, decoded, native));
  }

  if (!errors.empty()) {
    print_item_errors(err, errors);
    if (!options.skip_bad) {
      err << "error: " << errors.size() << " item(s) failed (use --skip-bad to continue)\n";
      return 1;
    }
    if (records.empty()) {
      err << "error: no items decoded\n";
      return 1;
    }
  }

  if (const int status = write_records(options.out, out, err, records); status != 0) {
    return status;
  }
  out << "decoded " << records.size() << " item(s)";
  if (!errors.empty()) out << " (" << errors.size() << " skipped)";
  out << "\n";
  return 0;
}

int run_eval(const EvalOptions& options, std::ostream& out, std::ostream& err,
             EvalReport* report) {
  if (options.predictions.empty() || options.labels.empty()) {
    err << "error: eval requires --predictions and --labels\n";
    return 1;
  }
  try {
    const std::vector<io::ScoreRecord> predictions = io::load_scores(options.predictions);
    const io::ManifestLoad labels = io::load_manifest(options.labels);
    if (!labels.errors.empty()) {
      print_item_errors(err, labels.errors);
      return 1;
    }

    std::unordered_map<std::string, double> label_by_id;
    label_by_id.reserve(labels.manifest.items.size());
    for (const data::AnnotatedItem& item : labels.manifest.items) {
      if (!label_by_id.emplace(item.id, item.mos).second) {
        err << "error: duplicate label id '" << item.id << "'\n";
        return 1;
      }
    }

    metrics::PairedSeries series;
    std::unordered_set<std::string> seen;
    for (const io::ScoreRecord& prediction : predictions) {
      const auto it = label_by_id.find(prediction.id);
      if (it == label_by_id.end()) {
        err << "error: prediction id '" << prediction.id << "' has no label\n";
        return 1;
      }
      if (!seen.insert(prediction.id).second) {
        err << "error: duplicate prediction id '" << prediction.id << "'\n";
        return 1;
      }
      series.predictions.push_back(prediction.score);
      series.labels.push_back(it->second);
    }
    if (seen.size() != label_by_id.size()) {
      err << "error: " << label_by_id.size() - seen.size() << " label id(s) have no prediction\n";
      return 1;
    }

    EvalReport result;
    result.dataset = labels.manifest.name;
    result.predictions_source = options.predictions;
    result.labels_source = options.labels;
    result.count = series.predictions.size();
    result.srcc = metrics::srcc(series);
    result.plcc = metrics::plcc(series);
    result.composite = (result.srcc + result.plcc) / 2.0;
    if (report) *report = result;

    out << "dataset          count  srcc     plcc     composite\n";
    out << result.dataset;
    for (std::size_t i = result.dataset.size(); i < 17; ++i) out << ' ';
    out << result.count << "  " << format_metric(result.srcc) << "   "
        << format_metric(result.plcc) << "   " << format_metric(result.composite) << "\n";

    const json record{{"dataset", result.dataset},
                      {"predictions", result.predictions_source},
                      {"labels", result.labels_source},
                      {"count", result.count},
                      {"srcc", result.srcc},
                      {"plcc", result.plcc},
                      {"composite", result.composite}};
    out << record.dump() << "\n";
    if (!options.out.empty()) {
      std::ofstream file(options.out);
      if (!file) {
        err << "error: cannot write " << options.out << "\n";
        return 1;
      }
      file << record.dump() << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  if (options.panels < 1) {
    err << "error: --panels must be at least 1\n";
    return 1;
  }
  sim::RaterMode mode;
  if (options.mode == "level") {
    mode = sim::RaterMode::LevelChoice;
  } else if (options.mode == "slider") {
    mode = sim::RaterMode::Slider;
  } else {
    err << "error: --mode must be level or slider\n";
    return 1;
  }

  try {
    SeededRng master(options.seed);
    std::vector<json> records;
    records.reserve(static_cast<std::size_t>(options.panels));
    for (int p = 0; p < options.panels; ++p) {
      sim::PanelConfig config;
      config.rater_count = options.raters;
      config.mode = mode;
      config.true_score = options.true_score ? *options.true_score
                                             : master.uniform(kCanonicalRange.min,
                                                              kCanonicalRange.max);
      config.noise_scale = options.noise;
      config.seed = master.next_u64();
      const sim::PanelOutcome outcome = sim::simulate_panel(config);
      records.push_back(io::panel_record(p, config, outcome, options.include_ratings));
    }
    return write_records(options.out, out, err, records);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_budget(const BudgetOptions& options, std::ostream& out, std::ostream& err) {
  if (options.duration.has_value() == !options.manifest.empty()) {
    err << "error: budget takes exactly one of --duration or --manifest\n";
    return 1;
  }
  try {
    std::vector<json> records;
    std::size_t over_budget = 0;
    if (options.duration) {
      const data::FramePlan plan = data::plan_frames(*options.duration, options.context_limit);
      records.push_back(io::frame_plan_record(plan, *options.duration));
      if (!plan.fits_context) ++over_budget;
    } else {
      const io::ManifestLoad load = io::load_manifest(options.manifest);
      if (!load.errors.empty()) {
        print_item_errors(err, load.errors);
        return 1;
      }
      for (const data::AnnotatedItem& item : load.manifest.items) {
        if (!item.duration_seconds) continue;
        const data::FramePlan plan =
            data::plan_frames(*item.duration_seconds, options.context_limit);
        json record = io::frame_plan_record(plan, *item.duration_seconds);
        record["id"] = item.id;
        records.push_back(std::move(record));
        if (!plan.fits_context) ++over_budget;
      }
    }
    if (const int status = write_records(options.out, out, err, records); status != 0) {
      return status;
    }
    if (over_budget > 0) {
      err << over_budget << " of " << records.size() << " plan(s) exceed the context budget\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_ensemble(const EnsembleOptions& options, std::ostream& out, std::ostream& err) {
  if (options.a.empty() || options.b.empty()) {
    err << "error: ensemble requires --a and --b\n";
    return 1;
  }
  if (!(options.weight >= 0.0 && options.weight <= 1.0)) {
    err << "error: --weight must lie in [0,1]\n";
    return 1;
  }
  try {
    const std::vector<io::ScoreRecord> a = io::load_scores(options.a);
    const std::vector<io::ScoreRecord> b = io::load_scores(options.b);
    if (a.size() != b.size()) {
      err << "error: score files have different sizes (" << a.size() << " vs " << b.size()
          << ")\n";
      return 1;
    }
    if (a.empty()) {
      err << "error: score files are empty\n";
      return 1;
    }

    std::unordered_map<std::string, double> b_by_id;
    b_by_id.reserve(b.size());
    for (const io::ScoreRecord& record : b) {
      if (!b_by_id.emplace(record.id, record.score).second) {
        err << "error: duplicate id '" << record.id << "' in " << options.b << "\n";
        return 1;
      }
    }

    // z-score each series, then weight-average; rank metrics downstream are
    // unaffected by each input's original affine scale.
    auto standardize = [&](const std::vector<double>& values, const std::string& source) {
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double var = 0.0;
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size());
      if (var == 0.0) {
        throw std::domain_error("score series in " + source + " has zero variance");
      }
      const double sd = std::sqrt(var);
      std::vector<double> z(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) z[i] = (values[i] - mean) / sd;
      return z;
    };

    std::vector<double> a_scores, b_scores;
    a_scores.reserve(a.size());
    b_scores.reserve(a.size());
    std::unordered_set<std::string> seen_a;
    seen_a.reserve(a.size());
    for (const io::ScoreRecord& record : a) {
      if (!seen_a.insert(record.id).second) {
        err << "error: duplicate id '" << record.id << "' in " << options.a << "\n";
        return 1;
      }
      const auto it = b_by_id.find(record.id);
      if (it == b_by_id.end()) {
        err << "error: id '" << record.id << "' missing from " << options.b << "\n";
        return 1;
      }
      a_scores.push_back(record.score);
      b_scores.push_back(it->second);
    }

    const std::vector<double> a_z = standardize(a_scores, options.a);
    const std::vector<double> b_z = standardize(b_scores, options.b);

    std::vector<json> records;
    records.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double fused = options.weight * a_z[i] + (1.0 - options.weight) * b_z[i];
      records.push_back(json{{"id", a[i].id}, {"score", fused}});
    }
    return write_records(options.out, out, err, records);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace levelscore::cli
