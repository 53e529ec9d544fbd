#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sensecf/data.hpp"
#include "sensecf/model.hpp"

namespace sensecf {

/// A factual/counterfactual pair with the model predictions recorded at
/// generation time.
struct CfPair {
  Instance factual;
  Instance counterfactual;
  Prediction factual_pred;
  Prediction cf_pred;
  std::string method;
  int attempts = 1;

  bool flipped() const { return cf_pred.label != factual_pred.label; }
};

struct CfBatch {
  std::vector<CfPair> pairs;
  std::size_t failures = 0;  // instances for which no counterfactual was produced

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

inline nlohmann::ordered_json instance_to_json(const Instance& x, const FeatureSchema& schema) {
  check_arity(schema, x);
  nlohmann::ordered_json j;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    if (schema.predictor(i).is_continuous()) {
      j[schema.predictor(i).name] = as_number(x.values[i]);
    } else {
      j[schema.predictor(i).name] = as_token(x.values[i]);
    }
  }
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j, const FeatureSchema& schema) {
  Instance x;
  x.values.reserve(schema.predictor_count());
  for (const auto& spec : schema.predictors()) {
    if (!j.contains(spec.name)) fail(ErrorCode::MissingFeature, "feature '" + spec.name + "' missing");
    const auto& field = j.at(spec.name);
    if (spec.is_continuous()) {
      if (!field.is_number()) fail(ErrorCode::NonNumericValue, "feature '" + spec.name + "' is not a number");
      x.values.emplace_back(field.get<double>());
    } else {
      // Tolerate a bare number for numeric-looking tokens such as "0"/"1".
      std::string token;
      if (field.is_string()) {
        token = field.get<std::string>();
      } else if (field.is_number_integer()) {
        token = std::to_string(field.get<long long>());
      } else {
        fail(ErrorCode::UnknownCategory, "feature '" + spec.name + "' is not a category token");
      }
      if (!spec.category_index(token))
        fail(ErrorCode::UnknownCategory, "feature '" + spec.name + "': token '" + token + "'");
      x.values.emplace_back(std::move(token));
    }
  }
  return x;
}

inline nlohmann::ordered_json pair_to_json(const CfPair& pair, const FeatureSchema& schema) {
  nlohmann::ordered_json j;
  j["factual"] = instance_to_json(pair.factual, schema);
  j["counterfactual"] = instance_to_json(pair.counterfactual, schema);
  j["factual_pred"] = {{"label", pair.factual_pred.label}, {"score", pair.factual_pred.score}};
  j["cf_pred"] = {{"label", pair.cf_pred.label}, {"score", pair.cf_pred.score}};
  j["method"] = pair.method;
  j["attempts"] = pair.attempts;
  return j;
}

inline CfPair pair_from_json(const nlohmann::json& j, const FeatureSchema& schema) {
  CfPair pair;
  pair.factual = instance_from_json(j.at("factual"), schema);
  pair.counterfactual = instance_from_json(j.at("counterfactual"), schema);
  pair.factual_pred.label = j.at("factual_pred").at("label").get<int>();
  pair.factual_pred.score = j.at("factual_pred").at("score").get<double>();
  pair.cf_pred.label = j.at("cf_pred").at("label").get<int>();
  pair.cf_pred.score = j.at("cf_pred").at("score").get<double>();
  pair.method = j.value("method", std::string());
  pair.attempts = j.value("attempts", 1);
  return pair;
}

/// JSON-lines: one object per pair with keys factual, counterfactual,
/// factual_pred, cf_pred, method, attempts.
inline std::string batch_to_jsonl(const CfBatch& batch, const FeatureSchema& schema) {
  std::string out;
  for (const auto& pair : batch.pairs) {
    out += pair_to_json(pair, schema).dump();
    out += "\n";
  }
  return out;
}

inline void write_jsonl(const CfBatch& batch, const FeatureSchema& schema, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
  out << batch_to_jsonl(batch, schema);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

inline CfBatch read_jsonl(const std::filesystem::path& path, const FeatureSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
  CfBatch batch;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::CsvParse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    batch.pairs.push_back(pair_from_json(j, schema));
  }
  return batch;
}

}  // namespace sensecf
