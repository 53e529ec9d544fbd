#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sensecf/transport.hpp"

namespace sensecf {

enum class ImmutablePolicy { RepairRevert, Reject };

struct GenConfig {
  bool verify_flip = true;
  int max_retries = 3;  // re-prompts per instance after the first attempt
  ImmutablePolicy immutable_policy = ImmutablePolicy::RepairRevert;
  double temperature = 0.0;
  std::uint64_t seed = 0;  // mock transport only
  std::size_t parallelism = 4;
};

struct ParsedResponse {
  Instance instance;
  bool repaired = false;
  std::vector<std::string> repaired_features;
};

namespace detail {

/// First balanced JSON object embedded anywhere in the text, or nullopt.
inline std::optional<nlohmann::json> first_json_object(const std::string& text) {
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = pos; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (c == '\\') ++i;
        else if (c == '"') in_string = false;
      } else if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          try {
            return nlohmann::json::parse(text.substr(pos, i - pos + 1));
          } catch (const nlohmann::json::exception&) {
            break;  // not valid JSON; keep scanning from the next brace
          }
        }
      }
    }
    ++pos;
  }
  return std::nullopt;
}

}  // namespace detail

/// Extracts the first JSON object from an arbitrary model response,
/// validates every schema feature, and applies the immutable policy:
/// repair-revert overwrites deviating immutables with the factual values and
/// records the repair, reject raises instead.
inline ParsedResponse parse_response(const std::string& text, const Instance& x_factual, const FeatureSchema& schema,
                                     ImmutablePolicy policy) {
  auto object = detail::first_json_object(text);
  if (!object) fail(ErrorCode::NoParseableObject, "response contains no JSON object");
  ParsedResponse parsed;
  parsed.instance = instance_from_json(*object, schema);
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    if (schema.predictor(i).is_mutable) continue;
    if (parsed.instance.values[i] == x_factual.values[i]) continue;
    if (policy == ImmutablePolicy::Reject)
      fail(ErrorCode::ImmutableChanged, "immutable feature '" + schema.predictor(i).name + "' was altered");
    parsed.instance.values[i] = x_factual.values[i];
    parsed.repaired = true;
    parsed.repaired_features.push_back(schema.predictor(i).name);
  }
  return parsed;
}

/// Prompts the transport once per instance (with retries carrying corrective
/// notes), parses and repairs responses, optionally verifies the flip against
/// the model, and assembles the batch. Up to config.parallelism transport
/// calls run concurrently; result order always matches input order.
using GenObserver = std::function<void(std::size_t index, const CfPair* pair)>;

inline CfBatch generate_llm_batch(const std::vector<Instance>& instances, const TrainedModel& model,
                                  const LlmTransport& transport, const FeatureSchema& schema, const PromptSpec& spec,
                                  const GenConfig& config, const Dataset* exemplar_pool = nullptr,
                                  const GenObserver& observer = {}) {
  if (!(model.schema() == schema)) fail(ErrorCode::SchemaMismatch, "model was trained on a different schema");

  std::optional<Bounds> pool_bounds;
  if (exemplar_pool != nullptr && !exemplar_pool->empty()) pool_bounds = feature_bounds(*exemplar_pool);

  const std::string method = spec.shots > 0 ? "llm-few" : "llm-zero";
  std::vector<std::optional<CfPair>> results(instances.size());
  std::mutex observer_mutex;
  auto notify = [&](std::size_t index) {
    if (!observer) return;
    std::lock_guard<std::mutex> lock(observer_mutex);
    observer(index, results[index] ? &*results[index] : nullptr);
  };

  auto run_one = [&](std::size_t index) {
    const Instance& x = instances[index];
    check_arity(schema, x);
    const Prediction factual_pred = model.predict(x);

    std::vector<Exemplar> exemplars = spec.exemplars;
    if (exemplars.empty() && spec.shots > 0 && exemplar_pool != nullptr)
      exemplars = choose_exemplars(x, factual_pred.label, model, *exemplar_pool, *pool_bounds, spec.shots);

    const std::string base_prompt = build_prompt(x, factual_pred, schema, spec, exemplars);
    std::string notes;
    const int total_attempts = 1 + std::max(0, config.max_retries);
    for (int attempt = 0; attempt < total_attempts; ++attempt) {
      const std::string prompt = notes.empty() ? base_prompt : base_prompt + "\n" + notes;
      std::string response;
      try {
        response = transport.send(prompt);
      } catch (const Error&) {
        continue;  // transport failure: retry, then count the instance as failed
      }
      ParsedResponse parsed;
      try {
        parsed = parse_response(response, x, schema, config.immutable_policy);
      } catch (const Error& e) {
        notes += std::string(e.code() == ErrorCode::ImmutableChanged ? kImmutableRetryNote : kParseRetryNote) + "\n";
        continue;
      }
      const Prediction cf_pred = model.predict(parsed.instance);
      if (config.verify_flip && cf_pred.label == factual_pred.label) {
        notes += std::string(kFlipRetryNote) + "\n";
        continue;
      }
      CfPair pair;
      pair.factual = x;
      pair.counterfactual = std::move(parsed.instance);
      pair.factual_pred = factual_pred;
      pair.cf_pred = cf_pred;
      pair.method = method;
      pair.attempts = attempt + 1;
      results[index] = std::move(pair);
      return;
    }
  };

  auto run_and_notify = [&](std::size_t i) {
    run_one(i);
    notify(i);
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.parallelism, instances.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < instances.size(); ++i) run_and_notify(i);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = cursor.fetch_add(1); i < instances.size(); i = cursor.fetch_add(1)) run_and_notify(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  CfBatch batch;
  for (auto& result : results) {
    if (result) {
      batch.pairs.push_back(std::move(*result));
    } else {
      ++batch.failures;
    }
  }
  return batch;
}

}  // namespace sensecf
