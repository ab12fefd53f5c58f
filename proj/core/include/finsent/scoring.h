#ifndef FINSENT_SCORING_H_
#define FINSENT_SCORING_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "finsent/labels.h"

namespace finsent::scoring {

// Probabilities over {negative, neutral, positive} in ordinal order.
using ClassProbs = std::array<double, kNumSentiments>;

struct NspScoreRequest {
  std::string sentence_a;
  std::string sentence_b;
};

struct NspScoreResponse {
  double p_is_next = 0.0;
};

struct SentimentScoreRequest {
  std::string text;
};

struct SentimentScoreResponse {
  ClassProbs probs{};
  Sentiment predicted() const;
};

// Implementations must be safe to call from several threads at once.
// Threshold rules belong to callers; scorers return raw probabilities.
class NspScorer {
 public:
  virtual ~NspScorer() = default;
  virtual double predict_nsp(std::string_view sentence_a,
                             std::string_view sentence_b) = 0;
};

class SentimentScorer {
 public:
  virtual ~SentimentScorer() = default;
  // Throws InvalidInput for empty text.
  virtual ClassProbs classify_sentiment(std::string_view text) = 0;
};

// Hash used by the mock NSP scorer: FNV-1a-64 over a, 0x1F, b.
std::uint64_t nsp_pair_hash(std::string_view sentence_a,
                            std::string_view sentence_b);

// (h mod 1000) / 999 for h = nsp_pair_hash(a, b).
double mock_nsp_probability(std::string_view sentence_a,
                            std::string_view sentence_b);

// One-hot on class (FNV-1a-64(text) mod 3).
ClassProbs mock_sentiment_probs(std::string_view text);

class MockNspScorer final : public NspScorer {
 public:
  double predict_nsp(std::string_view a, std::string_view b) override {
    return mock_nsp_probability(a, b);
  }
};

class MockSentimentScorer final : public SentimentScorer {
 public:
  ClassProbs classify_sentiment(std::string_view text) override;
};

// Throws InvalidResponse unless every entry is finite and non-negative and
// the sum is within 1e-6 of 1.
void check_distribution(const ClassProbs& probs);

enum class BackendKind : std::uint8_t { kMock, kRemote };

struct BackendConfig {
  BackendKind kind = BackendKind::kMock;
  std::string endpoint;  // e.g. "http://127.0.0.1:8080"
  std::chrono::milliseconds timeout{10000};
  std::size_t max_in_flight = 8;
  int retries = 2;

  // Throws InvalidConfig.
  void validate() const;
};

// Environment variable that overrides BackendConfig::endpoint.
inline constexpr const char* kEndpointEnvVar = "FINSENT_BACKEND_ENDPOINT";

// Reads JSON ({"kind": "remote", "endpoint": ..., "timeout_ms": ...,
// "max_in_flight": ..., "retries": ...}) or key=value lines with the same keys.
BackendConfig parse_backend_config(std::string_view text);

// Applies kEndpointEnvVar when set; a non-empty override implies kRemote.
BackendConfig apply_env_overrides(BackendConfig config);

struct HealthStatus {
  std::string status;
  std::string model;
};

// HTTP client for the model server. At most config.max_in_flight requests are
// outstanding at any time across all threads sharing the client. Transport
// failures are retried config.retries times; HTTP errors are not.
class RemoteBackend final : public NspScorer, public SentimentScorer {
 public:
  explicit RemoteBackend(BackendConfig config);
  ~RemoteBackend() override;

  RemoteBackend(const RemoteBackend&) = delete;
  RemoteBackend& operator=(const RemoteBackend&) = delete;

  double predict_nsp(std::string_view sentence_a,
                     std::string_view sentence_b) override;
  ClassProbs classify_sentiment(std::string_view text) override;
  HealthStatus health();

  const BackendConfig& config() const { return config_; }

 private:
  struct Impl;
  BackendConfig config_;
  std::unique_ptr<Impl> impl_;
};

struct Backend {
  std::shared_ptr<NspScorer> nsp;
  std::shared_ptr<SentimentScorer> sentiment;
};

Backend make_backend(const BackendConfig& config);

struct ItemError {
  enum class Kind : std::uint8_t {
    kTimeout,
    kRemote,
    kUnavailable,
    kInvalidInput,
    kInvalidResponse,
    kOther,
  };
  Kind kind = Kind::kOther;
  int status = 0;
  std::string message;
};

template <typename T>
struct BatchItem {
  std::optional<T> value;
  std::optional<ItemError> error;
  bool ok() const { return value.has_value(); }
};

// Results are positionally aligned with requests; per-item failures are
// recorded without aborting the batch. Throws InvalidInput on an empty batch.
std::vector<BatchItem<NspScoreResponse>> score_batch(
    NspScorer& scorer, std::span<const NspScoreRequest> requests,
    std::size_t max_in_flight);
std::vector<BatchItem<SentimentScoreResponse>> score_batch(
    SentimentScorer& scorer, std::span<const SentimentScoreRequest> requests,
    std::size_t max_in_flight);

}  // namespace finsent::scoring

#endif  // FINSENT_SCORING_H_
