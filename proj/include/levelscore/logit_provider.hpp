// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "levelscore/decode.hpp"

namespace levelscore::provider {

// Logits come from a recorded file of past model outputs.
struct ReplayConfig {
  std::string path;
};

// Logits come from an inference service. One POST per item to
// <endpoint path, default /v1/logits> with body
//   {"id": "...", "prompt": "...", "media": ["...", ...]}
// expecting 200 with
//   {"id": "...", "logits": {"bad": n, "poor": n, "fair": n, "good": n,
//                            "excellent": n}}
// Transport failures (no response, or 5xx) are retried up to max_retries
// with exponential backoff; malformed responses are never retried.
struct RemoteConfig {
  std::string endpoint;  // http://host[:port][/path]
  int timeout_ms = 10'000;
  int max_inflight = 4;
  int max_retries = 2;
  int backoff_base_ms = 100;
};

// Synthetic model: logits constructed so each item decodes to its target
// score, optionally perturbed by seeded noise.
struct MockConfig {
  double noise_scale = 0.0;
  uint64_t seed = 0;
  std::unordered_map<std::string, double> target_scores;  // id -> score in [1,5]
};

using ProviderConfig = std::variant<ReplayConfig, RemoteConfig, MockConfig>;

struct LogitRequest {
  std::string id;
  std::string user_text;
  std::vector<std::string> media_refs;
};

struct LogitResponse {
  std::string id;
  std::optional<LevelLogits> logits;  // empty on failure
  std::string error;                  // set when logits is empty

  bool ok() const { return logits.has_value(); }
};

// One response per request, in request order, whatever the source and
// completion order. Item failures are reported in the response, not thrown;
// unusable configuration or an unreadable replay file throws.
std::vector<LogitResponse> fetch_logits(const ProviderConfig& config,
                                        std::span<const LogitRequest> requests);

// Logits whose decode equals target_score exactly when noise_scale is zero:
// probability mass is split between the two levels bracketing the target and
// every other level is inactive. Noise adds seeded Gaussian perturbation to
// the active logits.
LevelLogits mock_lmm_logits(double target_score, double noise_scale, uint64_t seed);

}  // namespace levelscore::provider
