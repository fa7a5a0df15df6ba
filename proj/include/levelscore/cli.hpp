// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "levelscore/data_compiler.hpp"

namespace levelscore::cli {

// Environment variable consulted for the remote endpoint when --endpoint is
// not given.
inline constexpr const char* kEndpointEnvVar = "LEVELSCORE_ENDPOINT";

struct EvalReport {
  std::string dataset;
  std::string predictions_source;
  std::string labels_source;
  std::size_t count = 0;
  double srcc = 0.0;
  double plcc = 0.0;
  double composite = 0.0;
};

struct CompileOptions {
  std::vector<std::string> manifests;
  bool mix = false;
  std::optional<double> fewshot;
  uint64_t seed = 0;
  std::string out;
  bool skip_bad = false;
  // Partition on the observed min/max of each manifest's scores instead of
  // its declared nominal bounds.
  bool empirical_range = false;
};

struct DecodeOptions {
  std::string items;              // manifest path
  std::string provider = "replay";  // replay | remote | mock
  std::string replay;
  std::string endpoint;  // remote; falls back to LEVELSCORE_ENDPOINT
  int timeout_ms = 10'000;
  int max_inflight = 4;
  int retries = 2;
  double noise = 0.0;  // mock
  uint64_t seed = 0;
  std::string out;
  bool skip_bad = false;
};

struct EvalOptions {
  std::string predictions;
  std::string labels;
  std::string out;  // optional machine-readable record file
};

struct SimulateOptions {
  int panels = 1;
  int raters = 15;
  std::string mode = "level";  // level | slider
  std::optional<double> true_score;  // random per panel when unset
  double noise = 0.25;
  uint64_t seed = 0;
  std::string out;  // stdout when empty
  bool include_ratings = false;
};

struct BudgetOptions {
  std::optional<double> duration;
  std::string manifest;
  int context_limit = data::kDefaultContextTokens;
  std::string out;  // stdout when empty
};

struct EnsembleOptions {
  std::string a;
  std::string b;
  double weight = 0.5;
  std::string out;  // stdout when empty
};

// Each command returns a process exit status: 0 on success, nonzero when any
// per-item error occurred (unless skipped) or the inputs were unusable.
int run_compile(const CompileOptions& options, std::ostream& out, std::ostream& err);
int run_decode(const DecodeOptions& options, std::ostream& out, std::ostream& err);
int run_eval(const EvalOptions& options, std::ostream& out, std::ostream& err,
             EvalReport* report = nullptr);
int run_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int run_budget(const BudgetOptions& options, std::ostream& out, std::ostream& err);
int run_ensemble(const EnsembleOptions& options, std::ostream& out, std::ostream& err);

}  // namespace levelscore::cli
