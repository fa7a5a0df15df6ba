// SPDX-License-Identifier: Apache-2.0
#include "levelscore/logit_provider.hpp"

#include <gtest/gtest.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>

#include "httplib.h"
#include "json.hpp"
#include "levelscore/rng.hpp"

namespace levelscore::provider {
namespace {

using nlohmann::json;

json logits_object(double bad, double poor, double fair, double good, double excellent) {
  return json{{"bad", bad}, {"poor", poor}, {"fair", fair}, {"good", good},
              {"excellent", excellent}};
}

std::vector<LogitRequest> simple_requests(int count) {
  std::vector<LogitRequest> requests;
  for (int i = 0; i < count; ++i) {
    requests.push_back(LogitRequest{"item" + std::to_string(i), "Rate the quality of the image.",
                                    {"img" + std::to_string(i) + ".jpg"}});
  }
  return requests;
}

// --- replay -----------------------------------------------------------------

class ReplayTest : public ::testing::Test {
 protected:
  void SetUp() override {
    path_ = std::filesystem::temp_directory_path() /
            ("levelscore_replay_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::ofstream out(path_);
    out << R"({"id":"A-iqa","logits":{"excellent":18.03,"good":18.38,"fair":14.63,"poor":11.60,"bad":9.477}})"
        << "\n"
        << R"({"id":"B-iqa","logits":{"excellent":8.953,"good":11.37,"fair":15.31,"poor":18.06,"bad":16.59}})"
        << "\n";
  }
  void TearDown() override { std::filesystem::remove(path_); }

  std::filesystem::path path_;
};

TEST_F(ReplayTest, ReturnsLogitsInRequestOrder) {
  const std::vector<LogitRequest> requests = {{"B-iqa", "", {}}, {"A-iqa", "", {}}};
  const auto responses = fetch_logits(ReplayConfig{path_.string()}, requests);
  ASSERT_EQ(responses.size(), 2u);
  ASSERT_TRUE(responses[0].ok());
  EXPECT_EQ(responses[0].id, "B-iqa");
  EXPECT_DOUBLE_EQ(responses[0].logits->value(RatingLevel::Poor), 18.06);
  EXPECT_DOUBLE_EQ(responses[1].logits->value(RatingLevel::Good), 18.38);
}

TEST_F(ReplayTest, MissingIdIsAPerItemError) {
  const std::vector<LogitRequest> requests = {{"A-iqa", "", {}}, {"ghost", "", {}}};
  const auto responses = fetch_logits(ReplayConfig{path_.string()}, requests);
  EXPECT_TRUE(responses[0].ok());
  EXPECT_FALSE(responses[1].ok());
  EXPECT_NE(responses[1].error.find("not found"), std::string::npos);
}

TEST_F(ReplayTest, FetchingTwiceIsIdempotent) {
  const std::vector<LogitRequest> requests = {{"A-iqa", "", {}}, {"B-iqa", "", {}}};
  const auto first = fetch_logits(ReplayConfig{path_.string()}, requests);
  const auto second = fetch_logits(ReplayConfig{path_.string()}, requests);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (RatingLevel level : kLevels) {
      EXPECT_DOUBLE_EQ(first[i].logits->value(level), second[i].logits->value(level));
    }
  }
}

TEST(ReplayErrorTest, UnreadableFileThrows) {
  const std::vector<LogitRequest> requests = {{"x", "", {}}};
  EXPECT_THROW(fetch_logits(ReplayConfig{"/nonexistent/replay.jsonl"}, requests),
               std::runtime_error);
}

// --- mock -------------------------------------------------------------------

TEST(MockLogitsTest, HalfwayTargetSplitsMassEvenly) {
  const LevelLogits logits = mock_lmm_logits(3.5, 0.0, 0);
  const DecodedScore decoded = decode(logits);
  EXPECT_DOUBLE_EQ(decoded.probabilities.probability(RatingLevel::Fair), 0.5);
  EXPECT_DOUBLE_EQ(decoded.probabilities.probability(RatingLevel::Good), 0.5);
  EXPECT_EQ(decoded.probabilities.probability(RatingLevel::Bad), 0.0);
  EXPECT_NEAR(decoded.score, 3.5, 1e-12);
}

TEST(MockLogitsTest, EndpointsAreDegenerate) {
  const DecodedScore top = decode(mock_lmm_logits(5.0, 0.0, 1));
  EXPECT_DOUBLE_EQ(top.probabilities.probability(RatingLevel::Excellent), 1.0);
  EXPECT_DOUBLE_EQ(top.score, 5.0);
  const DecodedScore bottom = decode(mock_lmm_logits(1.0, 0.0, 1));
  EXPECT_DOUBLE_EQ(bottom.probabilities.probability(RatingLevel::Bad), 1.0);
  EXPECT_DOUBLE_EQ(bottom.score, 1.0);
}

TEST(MockLogitsTest, NoiselessRoundTripIsIdentity) {
  SeededRng rng(77);
  for (int trial = 0; trial < 2000; ++trial) {
    const double target = rng.uniform(1.0, 5.0);
    EXPECT_NEAR(decode(mock_lmm_logits(target, 0.0, trial)).score, target, 1e-12);
  }
}

TEST(MockLogitsTest, NoisyDecodesAverageNearTarget) {
  for (double target : {1.7, 3.0, 4.4}) {
    double sum = 0.0;
    for (uint64_t seed = 0; seed < 1000; ++seed) {
      sum += decode(mock_lmm_logits(target, 0.1, seed)).score;
    }
    EXPECT_NEAR(sum / 1000.0, target, 0.05);
  }
}

TEST(MockLogitsTest, SeedDeterminismAndValidation) {
  const LevelLogits a = mock_lmm_logits(2.3, 0.5, 99);
  const LevelLogits b = mock_lmm_logits(2.3, 0.5, 99);
  for (RatingLevel level : kLevels) {
    EXPECT_EQ(a.active(level), b.active(level));
    if (a.active(level)) {
      EXPECT_DOUBLE_EQ(a.value(level), b.value(level));
    }
  }
  EXPECT_THROW(mock_lmm_logits(0.5, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(mock_lmm_logits(5.5, 0.0, 0), std::invalid_argument);
  EXPECT_THROW(mock_lmm_logits(3.0, -1.0, 0), std::invalid_argument);
}

TEST(MockProviderTest, UsesTargetsAndReportsMissingOnes) {
  MockConfig config;
  config.target_scores = {{"item0", 2.25}, {"item2", 4.75}};
  const auto responses = fetch_logits(config, simple_requests(3));
  ASSERT_EQ(responses.size(), 3u);
  EXPECT_NEAR(decode(*responses[0].logits).score, 2.25, 1e-12);
  EXPECT_FALSE(responses[1].ok());
  EXPECT_NEAR(decode(*responses[2].logits).score, 4.75, 1e-12);
}

// --- remote -----------------------------------------------------------------

// Stub inference service with scriptable per-id behaviour.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/logits", [this](const httplib::Request& req, httplib::Response& res) {
      handle(req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

  int attempts(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    return attempts_[id];
  }

  // Fail the first `count` attempts for `id` with a 503.
  void inject_transient_failures(const std::string& id, int count) {
    std::lock_guard<std::mutex> lock(mutex_);
    transient_[id] = count;
  }

  void set_malformed(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    malformed_.insert(id);
  }

  void set_wrong_id(const std::string& id) {
    std::lock_guard<std::mutex> lock(mutex_);
    wrong_id_.insert(id);
  }

  void set_jitter(int max_ms) { jitter_max_ms_ = max_ms; }

 private:
  void handle(const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body);
    const std::string id = body.at("id").get<std::string>();
    {
      std::lock_guard<std::mutex> lock(mutex_);
      attempts_[id] += 1;
      auto transient = transient_.find(id);
      if (transient != transient_.end() && transient->second > 0) {
        transient->second -= 1;
        res.status = 503;
        return;
      }
    }
    if (jitter_max_ms_ > 0) {
      SeededRng rng(fnv1a64(id));
      std::this_thread::sleep_for(
          std::chrono::milliseconds(rng.below(static_cast<uint64_t>(jitter_max_ms_))));
    }
    json logits;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (malformed_.count(id) > 0) {
        logits = json{{"bad", 1.0}, {"poor", 2.0}, {"fair", 3.0}, {"good", 4.0}};
      } else {
        logits = logits_object(1.0, 2.0, 3.0, 4.0, 5.0);
      }
    }
    std::string respond_id = id;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (wrong_id_.count(id) > 0) respond_id = id + "-mismatch";
    }
    res.set_content(json{{"id", respond_id}, {"logits", logits}}.dump(), "application/json");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::unordered_map<std::string, int> attempts_;
  std::unordered_map<std::string, int> transient_;
  std::set<std::string> malformed_;
  std::set<std::string> wrong_id_;
  std::atomic<int> jitter_max_ms_{0};
};

RemoteConfig fast_config(const StubServer& server) {
  RemoteConfig config;
  config.endpoint = server.endpoint();
  config.timeout_ms = 2000;
  config.max_inflight = 4;
  config.max_retries = 2;
  config.backoff_base_ms = 5;
  return config;
}

TEST(RemoteProviderTest, ResponsesComeBackInRequestOrder) {
  StubServer server;
  server.set_jitter(15);
  RemoteConfig config = fast_config(server);
  config.max_inflight = 8;
  const auto requests = simple_requests(50);
  const auto responses = fetch_logits(config, requests);
  ASSERT_EQ(responses.size(), 50u);
  for (std::size_t i = 0; i < responses.size(); ++i) {
    ASSERT_TRUE(responses[i].ok()) << responses[i].error;
    EXPECT_EQ(responses[i].id, requests[i].id);
    EXPECT_DOUBLE_EQ(responses[i].logits->value(RatingLevel::Excellent), 5.0);
  }
}

TEST(RemoteProviderTest, TransientFailuresRecoverWithinRetries) {
  StubServer server;
  server.inject_transient_failures("item1", 2);
  server.inject_transient_failures("item3", 1);
  const auto responses = fetch_logits(fast_config(server), simple_requests(5));
  for (const LogitResponse& response : responses) {
    EXPECT_TRUE(response.ok()) << response.id << ": " << response.error;
  }
  EXPECT_EQ(server.attempts("item1"), 3);
  EXPECT_EQ(server.attempts("item3"), 2);
  EXPECT_EQ(server.attempts("item0"), 1);
}

TEST(RemoteProviderTest, PersistentTransportFailureErrorsAfterRetries) {
  StubServer server;
  server.inject_transient_failures("item0", 100);
  RemoteConfig config = fast_config(server);
  const auto responses = fetch_logits(config, simple_requests(1));
  ASSERT_FALSE(responses[0].ok());
  EXPECT_NE(responses[0].error.find("after 3 attempts"), std::string::npos);
  EXPECT_EQ(server.attempts("item0"), 3);
}

TEST(RemoteProviderTest, MalformedResponseFailsWithoutRetry) {
  StubServer server;
  server.set_malformed("item1");
  const auto responses = fetch_logits(fast_config(server), simple_requests(3));
  EXPECT_TRUE(responses[0].ok());
  ASSERT_FALSE(responses[1].ok());
  EXPECT_NE(responses[1].error.find("excellent"), std::string::npos);
  EXPECT_EQ(server.attempts("item1"), 1);  // contract bugs are not retried
  EXPECT_TRUE(responses[2].ok());
}

TEST(RemoteProviderTest, MismatchedResponseIdFailsWithoutRetry) {
  StubServer server;
  server.set_wrong_id("item0");
  const auto responses = fetch_logits(fast_config(server), simple_requests(1));
  ASSERT_FALSE(responses[0].ok());
  EXPECT_NE(responses[0].error.find("id does not match"), std::string::npos);
  EXPECT_EQ(server.attempts("item0"), 1);
}

TEST(RemoteProviderTest, ConnectionRefusedYieldsPerItemErrors) {
  // Bind a port, then close it so nothing is listening there.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteConfig config;
  config.endpoint = "http://127.0.0.1:" + std::to_string(port);
  config.timeout_ms = 200;
  config.max_retries = 1;
  config.backoff_base_ms = 1;
  const auto responses = fetch_logits(config, simple_requests(2));
  for (const LogitResponse& response : responses) {
    EXPECT_FALSE(response.ok());
    EXPECT_NE(response.error.find("transport failure"), std::string::npos);
  }
}

TEST(ProviderInterchangeabilityTest, AllSourcesSatisfyTheSameContract) {
  const auto requests = simple_requests(4);

  std::filesystem::path replay_path =
      std::filesystem::temp_directory_path() /
      ("levelscore_interop_" + std::to_string(::getpid()) + ".jsonl");
  {
    std::ofstream out(replay_path);
    for (const LogitRequest& request : requests) {
      out << json{{"id", request.id},
                  {"logits", logits_object(1, 2, 3, 4, 5)}}
                 .dump()
          << "\n";
    }
  }

  StubServer server;
  MockConfig mock;
  for (const LogitRequest& request : requests) mock.target_scores[request.id] = 3.25;

  const std::vector<ProviderConfig> configs = {
      ReplayConfig{replay_path.string()}, fast_config(server), mock};
  for (const ProviderConfig& config : configs) {
    const auto responses = fetch_logits(config, requests);
    ASSERT_EQ(responses.size(), requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      ASSERT_TRUE(responses[i].ok()) << responses[i].error;
      EXPECT_EQ(responses[i].id, requests[i].id);
      // Downstream decoding is source-agnostic.
      const double score = decode(*responses[i].logits).score;
      EXPECT_GE(score, 1.0);
      EXPECT_LE(score, 5.0);
    }
  }
  std::filesystem::remove(replay_path);
}

TEST(RemoteProviderTest, ConfigValidation) {
  const auto requests = simple_requests(1);
  RemoteConfig config;
  config.endpoint = "http://localhost:1";
  config.timeout_ms = 0;
  EXPECT_THROW(fetch_logits(config, requests), std::invalid_argument);
  config.timeout_ms = 100;
  config.max_inflight = 0;
  EXPECT_THROW(fetch_logits(config, requests), std::invalid_argument);
  config.max_inflight = 1;
  config.endpoint = "ftp://example";
  EXPECT_THROW(fetch_logits(config, requests), std::invalid_argument);
}

}  // namespace
}  // namespace levelscore::provider
