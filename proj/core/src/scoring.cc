#include "finsent/scoring.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <semaphore>

#include "finsent/error.h"
#include "finsent/parallel.h"
#include "finsent/text.h"
#include "httplib.h"
#include "json.hpp"

namespace finsent::scoring {
namespace {

using nlohmann::json;

ItemError to_item_error(std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const Timeout& e) {
    return {ItemError::Kind::kTimeout, 0, e.what()};
  } catch (const RemoteError& e) {
    return {ItemError::Kind::kRemote, e.status(), e.what()};
  } catch (const ScorerUnavailable& e) {
    return {ItemError::Kind::kUnavailable, 0, e.what()};
  } catch (const InvalidInput& e) {
    return {ItemError::Kind::kInvalidInput, 0, e.what()};
  } catch (const InvalidResponse& e) {
    return {ItemError::Kind::kInvalidResponse, 0, e.what()};
  } catch (const std::exception& e) {
    return {ItemError::Kind::kOther, 0, e.what()};
  } catch (...) {
    return {ItemError::Kind::kOther, 0, "unknown error"};
  }
}

template <typename Resp, typename Fn>
std::vector<BatchItem<Resp>> run_batch(std::size_t n, std::size_t max_in_flight,
                                       Fn&& call) {
  if (n == 0) throw InvalidInput("score_batch requires a non-empty batch");
  std::vector<BatchItem<Resp>> out(n);
  parallel_for(n, std::max<std::size_t>(1, max_in_flight), [&](std::size_t i) {
    try {
      out[i].value = call(i);
    } catch (...) {
      out[i].error = to_item_error(std::current_exception());
    }
  });
  return out;
}

}  // namespace

Sentiment SentimentScoreResponse::predicted() const {
  const auto it = std::max_element(probs.begin(), probs.end());
  return static_cast<Sentiment>(std::distance(probs.begin(), it));
}

std::uint64_t nsp_pair_hash(std::string_view sentence_a,
                            std::string_view sentence_b) {
  std::uint64_t h = fnv1a64(sentence_a);
  h = fnv1a64(std::string_view("\x1F", 1), h);
  return fnv1a64(sentence_b, h);
}

double mock_nsp_probability(std::string_view sentence_a,
                            std::string_view sentence_b) {
  return static_cast<double>(nsp_pair_hash(sentence_a, sentence_b) % 1000) /
         999.0;
}

ClassProbs mock_sentiment_probs(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty text");
  ClassProbs probs{};
  probs[fnv1a64(text) % kNumSentiments] = 1.0;
  return probs;
}

ClassProbs MockSentimentScorer::classify_sentiment(std::string_view text) {
  return mock_sentiment_probs(text);
}

void check_distribution(const ClassProbs& probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) {
      throw InvalidResponse("probability out of range");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidResponse("probabilities do not sum to 1");
  }
}

void BackendConfig::validate() const {
  if (max_in_flight < 1) throw InvalidConfig("max_in_flight must be >= 1");
  if (retries < 0) throw InvalidConfig("retries must be >= 0");
  if (timeout.count() <= 0) throw InvalidConfig("timeout must be positive");
  if (kind == BackendKind::kRemote && endpoint.empty()) {
    throw InvalidConfig("remote backend requires an endpoint");
  }
}

BackendConfig parse_backend_config(std::string_view text) {
  json j;
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw InvalidConfig("backend config is not valid JSON");
  } else {
    j = json::object();
    for (std::string_view line : split(body, '\n')) {
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw InvalidConfig("expected key=value: " + std::string(line));
      }
      j[std::string(trim(line.substr(0, eq)))] =
          std::string(trim(line.substr(eq + 1)));
    }
  }
  auto as_int = [](const json& v, const char* key) -> long long {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      char* end = nullptr;
      const long long out = std::strtoll(s.c_str(), &end, 10);
      if (end != s.c_str() && *end == '\0') return out;
    }
    throw InvalidConfig(std::string("bad integer for ") + key);
  };
  BackendConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") {
      const std::string kind = value.is_string() ? value.get<std::string>() : "";
      if (kind == "mock") {
        cfg.kind = BackendKind::kMock;
      } else if (kind == "remote") {
        cfg.kind = BackendKind::kRemote;
      } else {
        throw InvalidConfig("kind must be mock or remote");
      }
    } else if (key == "endpoint") {
      if (!value.is_string()) throw InvalidConfig("endpoint must be a string");
      cfg.endpoint = value.get<std::string>();
    } else if (key == "timeout_ms") {
      cfg.timeout = std::chrono::milliseconds(as_int(value, "timeout_ms"));
    } else if (key == "max_in_flight") {
      const long long v = as_int(value, "max_in_flight");
      if (v < 1) throw InvalidConfig("max_in_flight must be >= 1");
      cfg.max_in_flight = static_cast<std::size_t>(v);
    } else if (key == "retries") {
      cfg.retries = static_cast<int>(as_int(value, "retries"));
    } else {
      throw InvalidConfig("unknown backend config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

BackendConfig apply_env_overrides(BackendConfig config) {
  if (const char* env = std::getenv(kEndpointEnvVar); env && *env) {
    config.endpoint = env;
    config.kind = BackendKind::kRemote;
  }
  return config;
}

struct RemoteBackend::Impl {
  explicit Impl(const BackendConfig& cfg)
      : config(cfg), slots(static_cast<std::ptrdiff_t>(cfg.max_in_flight)) {}

  json post(const std::string& path, const json& body) {
    return send(path, &body);
  }
  json get(const std::string& path) { return send(path, nullptr); }

  json send(const std::string& path, const json* body) {
    const std::string payload = body ? body->dump() : std::string();
    httplib::Error last = httplib::Error::Unknown;
    for (int attempt = 0; attempt <= config.retries; ++attempt) {
      httplib::Result res = [&] {
        slots.acquire();
        httplib::Client client(config.endpoint);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
            config.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto r = body ? client.Post(path, payload, "application/json")
                      : client.Get(path);
        slots.release();
        return r;
      }();
      if (res) return decode(*res);
      last = res.error();
    }
    const std::string why = config.endpoint + path + ": " + httplib::to_string(last);
    if (last == httplib::Error::ConnectionTimeout || last == httplib::Error::Read) {
      throw Timeout("request timed out: " + why);
    }
    throw ScorerUnavailable("backend unreachable: " + why);
  }

  static json decode(const httplib::Response& res) {
    if (res.status < 200 || res.status >= 300) {
      throw RemoteError(res.status, res.body.substr(0, 200));
    }
    json j = json::parse(res.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw InvalidResponse("response body is not a JSON object");
    }
    return j;
  }

  BackendConfig config;
  std::counting_semaphore<> slots;
};

RemoteBackend::RemoteBackend(BackendConfig config)
    : config_(std::move(config)) {
  config_.validate();
  if (config_.endpoint.empty()) throw InvalidConfig("remote backend requires an endpoint");
  impl_ = std::make_unique<Impl>(config_);
}

RemoteBackend::~RemoteBackend() = default;

double RemoteBackend::predict_nsp(std::string_view sentence_a,
                                  std::string_view sentence_b) {
  const json res = impl_->post("/v1/nsp", {{"sentence_a", sentence_a},
                                           {"sentence_b", sentence_b}});
  if (!res.contains("p_is_next") || !res["p_is_next"].is_number()) {
    throw InvalidResponse("missing numeric p_is_next");
  }
  const double p = res["p_is_next"].get<double>();
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw InvalidResponse("p_is_next outside [0, 1]");
  }
  return p;
}

ClassProbs RemoteBackend::classify_sentiment(std::string_view text) {
  if (text.empty()) throw InvalidInput("empty text");
  const json res = impl_->post("/v1/sentiment", {{"text", text}});
  if (!res.contains("probs") || !res["probs"].is_object()) {
    throw InvalidResponse("missing probs object");
  }
  ClassProbs probs{};
  for (Sentiment s : kAllSentiments) {
    const std::string key(to_string(s));
    const auto& node = res["probs"];
    if (!node.contains(key) || !node[key].is_number()) {
      throw InvalidResponse("missing probability for " + key);
    }
    probs[index_of(s)] = node[key].get<double>();
  }
  check_distribution(probs);
  return probs;
}

HealthStatus RemoteBackend::health() {
  const json res = impl_->get("/v1/health");
  if (!res.contains("status") || !res["status"].is_string()) {
    throw InvalidResponse("missing status");
  }
  HealthStatus h;
  h.status = res["status"].get<std::string>();
  if (res.contains("model") && res["model"].is_string()) {
    h.model = res["model"].get<std::string>();
  }
  return h;
}

Backend make_backend(const BackendConfig& config) {
  config.validate();
  if (config.kind == BackendKind::kMock) {
    return {std::make_shared<MockNspScorer>(),
            std::make_shared<MockSentimentScorer>()};
  }
  auto remote = std::make_shared<RemoteBackend>(config);
  return {remote, remote};
}

std::vector<BatchItem<NspScoreResponse>> score_batch(
    NspScorer& scorer, std::span<const NspScoreRequest> requests,
    std::size_t max_in_flight) {
  return run_batch<NspScoreResponse>(
      requests.size(), max_in_flight, [&](std::size_t i) {
        const double p =
            scorer.predict_nsp(requests[i].sentence_a, requests[i].sentence_b);
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
          throw InvalidResponse("p_is_next outside [0, 1]");
        }
        return NspScoreResponse{p};
      });
}

std::vector<BatchItem<SentimentScoreResponse>> score_batch(
    SentimentScorer& scorer, std::span<const SentimentScoreRequest> requests,
    std::size_t max_in_flight) {
  return run_batch<SentimentScoreResponse>(
      requests.size(), max_in_flight, [&](std::size_t i) {
        SentimentScoreResponse r{scorer.classify_sentiment(requests[i].text)};
        check_distribution(r.probs);
        return r;
      });
}

}  // namespace finsent::scoring
