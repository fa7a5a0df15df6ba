// SPDX-License-Identifier: Apache-2.0
#include "levelscore/logit_provider.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "levelscore/io.hpp"
#include "levelscore/rng.hpp"

namespace levelscore::provider {

namespace {

using nlohmann::json;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

LogitResponse failure(const std::string& id, std::string message) {
  return LogitResponse{id, std::nullopt, std::move(message)};
}

std::vector<LogitResponse> fetch_replay(const ReplayConfig& config,
                                        std::span<const LogitRequest> requests) {
  const auto replay = io::load_replay(config.path);
  std::vector<LogitResponse> responses;
  responses.reserve(requests.size());
  for (const LogitRequest& request : requests) {
    const auto it = replay.find(request.id);
    if (it == replay.end()) {
      responses.push_back(failure(request.id, "id not found in replay file"));
    } else {
      responses.push_back(LogitResponse{request.id, it->second, ""});
    }
  }
  return responses;
}

std::vector<LogitResponse> fetch_mock(const MockConfig& config,
                                      std::span<const LogitRequest> requests) {
  if (!std::isfinite(config.noise_scale) || config.noise_scale < 0.0) {
    throw std::invalid_argument("mock noise scale must be finite and non-negative");
  }
  std::vector<LogitResponse> responses;
  responses.reserve(requests.size());
  for (const LogitRequest& request : requests) {
    const auto it = config.target_scores.find(request.id);
    if (it == config.target_scores.end()) {
      responses.push_back(failure(request.id, "no target score for id"));
      continue;
    }
    // Per-item stream derived from the batch seed and the item id, so a
    // batch stays deterministic regardless of how it is split up.
    const uint64_t item_seed = fnv1a64(request.id) ^ splitmix64(config.seed);
    try {
      responses.push_back(
          LogitResponse{request.id, mock_lmm_logits(it->second, config.noise_scale, item_seed), ""});
    } catch (const std::exception& e) {
      responses.push_back(failure(request.id, e.what()));
    }
  }
  return responses;
}

struct ParsedEndpoint {
  std::string host;
  int port = 80;
  std::string path = "/v1/logits";
};

ParsedEndpoint parse_endpoint(const std::string& endpoint) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint.rfind(kScheme, 0) != 0) {
    throw std::invalid_argument("endpoint must start with http:// (got '" + endpoint + "')");
  }
  ParsedEndpoint parsed;
  std::string rest = endpoint.substr(kScheme.size());
  const std::size_t slash = rest.find('/');
  if (slash != std::string::npos) {
    parsed.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  const std::size_t colon = rest.find(':');
  if (colon != std::string::npos) {
    parsed.host = rest.substr(0, colon);
    parsed.port = std::stoi(rest.substr(colon + 1));
  } else {
    parsed.host = rest;
  }
  if (parsed.host.empty()) throw std::invalid_argument("endpoint has no host");
  return parsed;
}

// Parses and validates one wire response; returns the error message on
// failure. Malformed responses are contract bugs, so callers must not retry.
std::optional<LevelLogits> parse_wire_response(const std::string& body,
                                               const std::string& expected_id,
                                               std::string* error) {
  json object;
  try {
    object = json::parse(body);
  } catch (const json::exception& e) {
    *error = std::string("invalid response body: ") + e.what();
    return std::nullopt;
  }
  if (!object.contains("id") || object["id"] != expected_id) {
    *error = "response id does not match request id";
    return std::nullopt;
  }
  if (!object.contains("logits")) {
    *error = "response has no logits object";
    return std::nullopt;
  }
  try {
    return io::logits_from_json(object["logits"]);
  } catch (const std::runtime_error& e) {
    *error = std::string("malformed logits: ") + e.what();
    return std::nullopt;
  }
}

LogitResponse fetch_one_remote(httplib::Client& client, const ParsedEndpoint& endpoint,
                               const RemoteConfig& config, const LogitRequest& request) {
  const std::string body =
      json{{"id", request.id}, {"prompt", request.user_text}, {"media", request.media_refs}}
          .dump();

  std::string transport_error;
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(static_cast<long long>(config.backoff_base_ms) << (attempt - 1)));
    }
    auto result = client.Post(endpoint.path, body, "application/json");
    if (!result) {
      transport_error = httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      transport_error = "server returned status " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      return failure(request.id, "unexpected status " + std::to_string(result->status));
    }
    std::string parse_error;
    auto logits = parse_wire_response(result->body, request.id, &parse_error);
    if (!logits) {
      return failure(request.id, parse_error);
    }
    return LogitResponse{request.id, std::move(logits), ""};
  }
  return failure(request.id, "transport failure after " + std::to_string(config.max_retries + 1) +
                                 " attempts: " + transport_error);
}

std::vector<LogitResponse> fetch_remote(const RemoteConfig& config,
                                        std::span<const LogitRequest> requests) {
  if (config.timeout_ms <= 0) throw std::invalid_argument("timeout must be positive");
  if (config.max_inflight < 1) throw std::invalid_argument("max_inflight must be at least 1");
  if (config.max_retries < 0) throw std::invalid_argument("max_retries must be non-negative");
  const ParsedEndpoint endpoint = parse_endpoint(config.endpoint);

  std::vector<LogitResponse> responses(requests.size());
  if (requests.empty()) return responses;

  // Workers pull the next request index and write into its slot, so the
  // output order equals the input order no matter when responses arrive.
  std::atomic<std::size_t> next{0};
  const std::size_t worker_count =
      std::min<std::size_t>(static_cast<std::size_t>(config.max_inflight), requests.size());

  auto worker = [&]() {
    httplib::Client client(endpoint.host, endpoint.port);
    const time_t timeout_sec = config.timeout_ms / 1000;
    const time_t timeout_usec = static_cast<time_t>(config.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(timeout_sec, timeout_usec);
    client.set_read_timeout(timeout_sec, timeout_usec);
    client.set_write_timeout(timeout_sec, timeout_usec);
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) break;
      responses[i] = fetch_one_remote(client, endpoint, config, requests[i]);
    }
  };

  std::vector<std::thread> workers;
  workers.reserve(worker_count);
  for (std::size_t w = 0; w < worker_count; ++w) workers.emplace_back(worker);
  for (std::thread& t : workers) t.join();
  return responses;
}

}  // namespace

std::vector<LogitResponse> fetch_logits(const ProviderConfig& config,
                                        std::span<const LogitRequest> requests) {
  return std::visit(
      [&](const auto& c) -> std::vector<LogitResponse> {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ReplayConfig>) {
          return fetch_replay(c, requests);
        } else if constexpr (std::is_same_v<T, RemoteConfig>) {
          return fetch_remote(c, requests);
        } else {
          return fetch_mock(c, requests);
        }
      },
      config);
}

LevelLogits mock_lmm_logits(double target_score, double noise_scale, uint64_t seed) {
  if (!std::isfinite(target_score) || target_score < kCanonicalRange.min ||
      target_score > kCanonicalRange.max) {
    throw std::invalid_argument("mock target score must lie in [1,5]");
  }
  if (!std::isfinite(noise_scale) || noise_scale < 0.0) {
    throw std::invalid_argument("mock noise scale must be finite and non-negative");
  }

  const int lower = std::min(4, static_cast<int>(std::floor(target_score)));
  const double upper_mass = target_score - static_cast<double>(lower);  // exact

  const RatingLevel low_level = level_from_ordinal(lower);
  LevelLogits result;
  if (upper_mass == 0.0) {
    // Integer target: all mass on one level.
    for (RatingLevel level : kLevels) {
      if (level != low_level) result.deactivate(level);
    }
    result.set(low_level, 0.0);
  } else if (upper_mass == 1.0) {
    // target_score == 5: all mass on the top level.
    for (RatingLevel level : kLevels) {
      if (level != RatingLevel::Excellent) result.deactivate(level);
    }
    result.set(RatingLevel::Excellent, 0.0);
  } else {
    const RatingLevel high_level = level_from_ordinal(lower + 1);
    for (RatingLevel level : kLevels) {
      if (level != low_level && level != high_level) result.deactivate(level);
    }
    result.set(low_level, std::log(1.0 - upper_mass));
    result.set(high_level, std::log(upper_mass));
  }

  if (noise_scale > 0.0) {
    SeededRng rng(seed);
    for (RatingLevel level : kLevels) {
      if (result.active(level)) {
        result.set(level, result.value(level) + noise_scale * rng.gaussian());
      }
    }
  }
  return result;
}

}  // namespace levelscore::provider
