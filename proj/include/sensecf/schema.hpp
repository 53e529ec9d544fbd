#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "sensecf/core.hpp"

namespace sensecf {

enum class FeatureKind { Continuous, Categorical };
enum class FeatureRole { Predictor, Target };

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  bool is_mutable = true;
  FeatureRole role = FeatureRole::Predictor;
  std::vector<std::string> categories;  // ordered domain, categorical only

  bool is_continuous() const { return kind == FeatureKind::Continuous; }
  bool is_categorical() const { return kind == FeatureKind::Categorical; }

  std::optional<std::size_t> category_index(const std::string& token) const {
    auto it = std::find(categories.begin(), categories.end(), token);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }
};

/// Declarative feature description: ordered predictors plus one binary
/// categorical target. Immutable after construction.
class FeatureSchema {
 public:
  FeatureSchema() = default;  // empty placeholder; populated via from_features/load_schema

  static FeatureSchema from_features(std::vector<FeatureSpec> features) {
    FeatureSchema schema;
    std::unordered_map<std::string, int> seen;
    std::optional<FeatureSpec> target;
    for (auto& spec : features) {
      if (spec.name.empty()) fail(ErrorCode::Config, "feature with empty name");
      if (++seen[spec.name] > 1) fail(ErrorCode::DuplicateName, "feature '" + spec.name + "' declared twice");
      if (spec.is_categorical()) {
        if (spec.categories.empty())
          fail(ErrorCode::Config, "categorical feature '" + spec.name + "' has no categories");
        std::unordered_map<std::string, int> cat_seen;
        for (const auto& c : spec.categories)
          if (++cat_seen[c] > 1)
            fail(ErrorCode::Config, "feature '" + spec.name + "' repeats category '" + c + "'");
      } else if (!spec.categories.empty()) {
        fail(ErrorCode::Config, "continuous feature '" + spec.name + "' declares categories");
      }
      if (spec.role == FeatureRole::Target) {
        if (target) fail(ErrorCode::MultipleTargets, "'" + target->name + "' and '" + spec.name + "'");
        if (!spec.is_categorical() || spec.categories.size() != 2)
          fail(ErrorCode::InvalidTarget, "target '" + spec.name + "' must be categorical with exactly 2 categories");
        target = spec;
      } else {
        schema.predictors_.push_back(spec);
      }
    }
    if (!target) fail(ErrorCode::NoTarget, "no feature has role=target");
    schema.target_ = *target;
    for (std::size_t i = 0; i < schema.predictors_.size(); ++i)
      schema.index_.emplace(schema.predictors_[i].name, i);
    return schema;
  }

  const std::vector<FeatureSpec>& predictors() const { return predictors_; }
  const FeatureSpec& target() const { return target_; }
  std::size_t predictor_count() const { return predictors_.size(); }

  const FeatureSpec& predictor(std::size_t i) const { return predictors_[i]; }

  std::optional<std::size_t> index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::string> immutable_names() const {
    std::vector<std::string> out;
    for (const auto& f : predictors_)
      if (!f.is_mutable) out.push_back(f.name);
    return out;
  }

  std::vector<std::string> mutable_names() const {
    std::vector<std::string> out;
    for (const auto& f : predictors_)
      if (f.is_mutable) out.push_back(f.name);
    return out;
  }

  /// Label index (0 or 1) for a target category token.
  int label_of(const std::string& token) const {
    auto idx = target_.category_index(token);
    if (!idx) fail(ErrorCode::UnknownCategory, "target token '" + token + "'");
    return static_cast<int>(*idx);
  }

  const std::string& label_token(int label) const { return target_.categories[static_cast<std::size_t>(label)]; }

  bool operator==(const FeatureSchema& other) const {
    auto spec_eq = [](const FeatureSpec& a, const FeatureSpec& b) {
      return a.name == b.name && a.kind == b.kind && a.is_mutable == b.is_mutable &&
             a.role == b.role && a.categories == b.categories;
    };
    if (!spec_eq(target_, other.target_)) return false;
    if (predictors_.size() != other.predictors_.size()) return false;
    for (std::size_t i = 0; i < predictors_.size(); ++i)
      if (!spec_eq(predictors_[i], other.predictors_[i])) return false;
    return true;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    auto emit = [&](const FeatureSpec& f) {
      nlohmann::ordered_json j;
      j["name"] = f.name;
      j["kind"] = f.is_continuous() ? "continuous" : "categorical";
      j["mutable"] = f.is_mutable;
      j["role"] = f.role == FeatureRole::Target ? "target" : "predictor";
      if (f.is_categorical()) j["categories"] = f.categories;
      features.push_back(std::move(j));
    };
    for (const auto& f : predictors_) emit(f);
    emit(target_);
    return nlohmann::ordered_json{{"features", std::move(features)}};
  }

 private:
  std::vector<FeatureSpec> predictors_;
  FeatureSpec target_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses a schema config (JSON text listing features with kind, mutable,
/// role and, for categoricals, an ordered category domain).
inline FeatureSchema load_schema(const std::string& config_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(config_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Config, std::string("schema config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
    fail(ErrorCode::Config, "schema config must be an object with a 'features' array");

  std::vector<FeatureSpec> specs;
  for (const auto& item : doc["features"]) {
    if (!item.is_object() || !item.contains("name") || !item.contains("kind"))
      fail(ErrorCode::Config, "each feature needs at least 'name' and 'kind'");
    FeatureSpec spec;
    spec.name = item["name"].get<std::string>();
    const std::string kind = item["kind"].get<std::string>();
    if (kind == "continuous") {
      spec.kind = FeatureKind::Continuous;
    } else if (kind == "categorical") {
      spec.kind = FeatureKind::Categorical;
    } else {
      fail(ErrorCode::UnknownKind, "feature '" + spec.name + "' has kind '" + kind + "'");
    }
    spec.is_mutable = item.value("mutable", true);
    const std::string role = item.value("role", std::string("predictor"));
    if (role == "target") {
      spec.role = FeatureRole::Target;
    } else if (role == "predictor") {
      spec.role = FeatureRole::Predictor;
    } else {
      fail(ErrorCode::Config, "feature '" + spec.name + "' has role '" + role + "'");
    }
    if (item.contains("categories")) spec.categories = item["categories"].get<std::vector<std::string>>();
    specs.push_back(std::move(spec));
  }
  return FeatureSchema::from_features(std::move(specs));
}

}  // namespace sensecf
