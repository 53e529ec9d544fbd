#pragma once

#include <cstdlib>
#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "sensecf/prompt.hpp"

namespace sensecf {

/// Contract for talking to a language model. Implementations must be safe
/// for concurrent send() calls.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual std::string send(const std::string& prompt) const = 0;
};

struct TransportConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4o-mini";
  double temperature = 0.0;
  int timeout_secs = 60;
  int max_retries = 2;  // network-level retries per send
  std::string api_key_env = "SENSECF_API_KEY";
};

/// Chat-completions-style HTTP client. The bearer token is read from the
/// configured environment variable, never from flags or files.
class HttpTransport : public LlmTransport {
 public:
  explicit HttpTransport(TransportConfig config) : config_(std::move(config)) {}

  std::string send(const std::string& prompt) const override {
    const char* key = std::getenv(config_.api_key_env.c_str());
    nlohmann::ordered_json body;
    body["model"] = config_.model;
    body["temperature"] = config_.temperature;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
      httplib::Client client(config_.base_url);
      client.set_connection_timeout(config_.timeout_secs, 0);
      client.set_read_timeout(config_.timeout_secs, 0);
      httplib::Headers headers;
      if (key != nullptr && *key != '\0') headers.emplace("Authorization", std::string("Bearer ") + key);
      auto res = client.Post(config_.path, headers, payload, "application/json");
      if (!res) {
        last_error = "connection error (" + httplib::to_string(res.error()) + ")";
        continue;
      }
      if (res->status >= 500) {
        last_error = "server error " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200)
        fail(ErrorCode::Transport, "endpoint returned status " + std::to_string(res->status) + ": " + res->body);
      try {
        const auto doc = nlohmann::json::parse(res->body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::Transport, std::string("malformed completion response: ") + e.what());
      }
    }
    fail(ErrorCode::Transport, "request failed after retries: " + last_error);
  }

  const TransportConfig& config() const { return config_; }

 private:
  TransportConfig config_;
};

/// Deterministic stand-in for a live model: parses the factual instance out
/// of the prompt, answers with its nearest unlike neighbor (per the reference
/// model), and reverts immutable features to the factual values. Retry notes
/// in the prompt advance to the next-nearest unlike neighbor.
class MockTransport : public LlmTransport {
 public:
  MockTransport(Dataset reference, TrainedModel model, std::uint64_t seed)
      : reference_(std::move(reference)),
        model_(std::move(model)),
        bounds_(feature_bounds(reference_)),
        seed_(seed) {}

  std::string send(const std::string& prompt) const override {
    const Instance factual = extract_instance(prompt);
    auto ranked = unlike_neighbors_ranked(factual, model_, reference_, bounds_);
    if (ranked.empty()) fail(ErrorCode::Transport, "mock has no unlike neighbors to answer with");
    const std::size_t attempt = count_occurrences(prompt, kFlipRetryNote);
    const std::size_t pick = std::min(attempt, ranked.size() - 1);
    Instance answer = reference_.rows[ranked[pick]];
    for (std::size_t i = 0; i < reference_.schema.predictor_count(); ++i)
      if (!reference_.schema.predictor(i).is_mutable) answer.values[i] = factual.values[i];
    return instance_to_json(answer, reference_.schema).dump();
  }

  std::uint64_t seed() const { return seed_; }

 private:
  Instance extract_instance(const std::string& prompt) const {
    const std::size_t marker = prompt.find(kInstanceMarker);
    if (marker == std::string::npos)
      fail(ErrorCode::Transport, "mock transport requires the instance marker in the prompt");
    const std::size_t start = prompt.find('{', marker);
    if (start == std::string::npos) fail(ErrorCode::Transport, "no JSON object after the instance marker");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(prompt.substr(start, balanced_object_length(prompt, start)));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Transport, std::string("cannot parse the prompt's instance: ") + e.what());
    }
    return instance_from_json(j, reference_.schema);
  }

  static std::size_t balanced_object_length(const std::string& text, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) return i - start + 1;
      }
    }
    return text.size() - start;
  }

  static std::size_t count_occurrences(const std::string& text, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
      ++count;
      pos += needle.size();
    }
    return count;
  }

  Dataset reference_;
  TrainedModel model_;
  Bounds bounds_;
  std::uint64_t seed_;
};

}  // namespace sensecf
