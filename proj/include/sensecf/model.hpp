#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <variant>

#include <json.hpp>

#include "sensecf/data.hpp"
#include "sensecf/encode.hpp"
#include "sensecf/models/linear.hpp"
#include "sensecf/models/neural.hpp"
#include "sensecf/models/tree.hpp"

namespace sensecf {

enum class ModelKind { TreeEnsemble, BoostedTrees, Linear, Neural };

inline const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::TreeEnsemble: return "tree-ensemble";
    case ModelKind::BoostedTrees: return "boosted-trees";
    case ModelKind::Linear: return "linear";
    case ModelKind::Neural: return "neural";
  }
  return "unknown";
}

inline ModelKind model_kind_from_name(const std::string& name) {
  if (name == "tree-ensemble" || name == "rf") return ModelKind::TreeEnsemble;
  if (name == "boosted-trees" || name == "xgb") return ModelKind::BoostedTrees;
  if (name == "linear" || name == "svc") return ModelKind::Linear;
  if (name == "neural" || name == "nn") return ModelKind::Neural;
  fail(ErrorCode::UnknownKind, "model kind '" + name + "'");
}

struct Hyperparams {
  int trees = 100;           // tree-ensemble
  int max_depth = 16;        // tree-ensemble
  int min_leaf = 1;          // tree-ensemble
  int rounds = 100;          // boosted-trees
  int boost_depth = 3;       // boosted-trees
  double learning_rate = 0.1;
  double l2 = 1e-4;          // linear penalty
  int epochs = 200;          // linear + neural
  int hidden = 16;           // neural
  double nn_rate = 0.3;      // neural
  double momentum = 0.9;     // neural
  double nn_l2 = 0.0;        // neural penalty
};

struct Prediction {
  int label = 0;
  double score = 0.0;
};

/// An immutable trained binary classifier: kind, encoding, decision
/// threshold, and opaque parameters.
class TrainedModel {
 public:
  TrainedModel() = default;

  double score(const Instance& x) const { return score_encoded(encode(x, encoding_)); }

  double score_encoded(const std::vector<double>& v) const {
    return std::visit([&](const auto& impl) { return impl.score(v); }, impl_);
  }

  Prediction predict(const Instance& x) const {
    const double s = score(x);
    return Prediction{s >= threshold_ ? 1 : 0, s};
  }

  Prediction predict_encoded(const std::vector<double>& v) const {
    const double s = score_encoded(v);
    return Prediction{s >= threshold_ ? 1 : 0, s};
  }

  ModelKind kind() const { return kind_; }
  const EncodingSpec& encoding() const { return encoding_; }
  const FeatureSchema& schema() const { return schema_; }
  double threshold() const { return threshold_; }
  double train_accuracy() const { return train_accuracy_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["kind"] = model_kind_name(kind_);
    j["threshold"] = threshold_;
    j["train_accuracy"] = train_accuracy_;
    j["schema"] = schema_.to_json();
    nlohmann::ordered_json enc = nlohmann::ordered_json::array();
    for (const auto& f : encoding_.features) {
      nlohmann::ordered_json e;
      e["kind"] = f.kind == FeatureKind::Continuous ? "continuous" : "categorical";
      e["offset"] = f.offset;
      if (f.kind == FeatureKind::Continuous) {
        e["lo"] = f.lo;
        e["hi"] = f.hi;
      } else {
        e["categories"] = f.categories;
      }
      enc.push_back(std::move(e));
    }
    j["encoding"] = std::move(enc);
    j["params"] = params_json();
    return j;
  }

  static TrainedModel from_json(const nlohmann::json& j) {
    if (j.value("format_version", 0) != 1) fail(ErrorCode::Config, "unsupported model file version");
    TrainedModel model;
    model.kind_ = model_kind_from_name(j.at("kind").get<std::string>());
    model.threshold_ = j.at("threshold").get<double>();
    model.train_accuracy_ = j.value("train_accuracy", 0.0);
    model.schema_ = load_schema(j.at("schema").dump());
    model.encoding_.features.clear();
    std::size_t dim = 0;
    for (const auto& e : j.at("encoding")) {
      EncodingSpec::Feature f;
      f.offset = e.at("offset").get<std::size_t>();
      if (e.at("kind").get<std::string>() == "continuous") {
        f.kind = FeatureKind::Continuous;
        f.lo = e.at("lo").get<double>();
        f.hi = e.at("hi").get<double>();
        dim += 1;
      } else {
        f.kind = FeatureKind::Categorical;
        f.categories = e.at("categories").get<std::vector<std::string>>();
        dim += f.categories.size();
      }
      model.encoding_.features.push_back(std::move(f));
    }
    model.encoding_.dim = dim;
    model.load_params(j.at("params"));
    return model;
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << to_json().dump(2) << "\n";
  }

  static TrainedModel load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::Io, "cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::Config, "model file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
  }

  friend TrainedModel train(ModelKind, const Dataset&, const Hyperparams&, std::uint64_t);

 private:
  nlohmann::ordered_json params_json() const {
    nlohmann::ordered_json p;
    if (const auto* forest = std::get_if<Forest>(&impl_)) {
      nlohmann::ordered_json trees = nlohmann::ordered_json::array();
      for (const auto& t : forest->trees) trees.push_back(t.to_json());
      p["trees"] = std::move(trees);
    } else if (const auto* gbt = std::get_if<Gbt>(&impl_)) {
      p["base_score"] = gbt->base_score;
      p["learning_rate"] = gbt->learning_rate;
      nlohmann::ordered_json trees = nlohmann::ordered_json::array();
      for (const auto& t : gbt->trees) trees.push_back(t.to_json());
      p["trees"] = std::move(trees);
    } else if (const auto* linear = std::get_if<LinearModel>(&impl_)) {
      p["weights"] = linear->weights;
      p["bias"] = linear->bias;
    } else if (const auto* net = std::get_if<NeuralModel>(&impl_)) {
      p["input_dim"] = net->input_dim;
      p["hidden_dim"] = net->hidden_dim;
      p["params"] = net->params;
    }
    return p;
  }

  void load_params(const nlohmann::json& p) {
    switch (kind_) {
      case ModelKind::TreeEnsemble: {
        Forest forest;
        for (const auto& t : p.at("trees")) forest.trees.push_back(Tree::from_json(t));
        impl_ = std::move(forest);
        break;
      }
      case ModelKind::BoostedTrees: {
        Gbt gbt;
        gbt.base_score = p.at("base_score").get<double>();
        gbt.learning_rate = p.at("learning_rate").get<double>();
        for (const auto& t : p.at("trees")) gbt.trees.push_back(Tree::from_json(t));
        impl_ = std::move(gbt);
        break;
      }
      case ModelKind::Linear: {
        LinearModel linear;
        linear.weights = p.at("weights").get<std::vector<double>>();
        linear.bias = p.at("bias").get<double>();
        impl_ = std::move(linear);
        break;
      }
      case ModelKind::Neural: {
        NeuralModel net;
        net.input_dim = p.at("input_dim").get<std::size_t>();
        net.hidden_dim = p.at("hidden_dim").get<std::size_t>();
        net.params = p.at("params").get<std::vector<double>>();
        impl_ = std::move(net);
        break;
      }
    }
  }

  ModelKind kind_ = ModelKind::TreeEnsemble;
  EncodingSpec encoding_;
  FeatureSchema schema_;
  double threshold_ = 0.5;
  double train_accuracy_ = 0.0;
  std::variant<Forest, Gbt, LinearModel, NeuralModel> impl_;
};

/// Fits a model of the requested kind on the training set; deterministic
/// given the seed.
inline TrainedModel train(ModelKind kind, const Dataset& train_set, const Hyperparams& hp, std::uint64_t seed) {
  if (train_set.empty()) fail(ErrorCode::EmptyDataset, "training set is empty");
  const std::size_t pos = train_set.count_label(1);
  if (pos == 0 || pos == train_set.size())
    fail(ErrorCode::SingleClass, "training set contains a single class");

  TrainedModel model;
  model.kind_ = kind;
  model.schema_ = train_set.schema;
  model.encoding_ = EncodingSpec::from_bounds(train_set.schema, feature_bounds(train_set));

  std::vector<std::vector<double>> X;
  X.reserve(train_set.size());
  for (const auto& row : train_set.rows) X.push_back(encode(row, model.encoding_));
  const std::vector<int>& y = train_set.labels;

  switch (kind) {
    case ModelKind::TreeEnsemble:
      model.impl_ = Forest::fit(X, y, hp.trees, hp.max_depth, hp.min_leaf, seed);
      break;
    case ModelKind::BoostedTrees:
      model.impl_ = Gbt::fit(X, y, hp.rounds, hp.boost_depth, hp.learning_rate);
      break;
    case ModelKind::Linear:
      model.impl_ = LinearModel::fit(X, y, hp.l2, hp.epochs, seed);
      break;
    case ModelKind::Neural:
      model.impl_ = NeuralModel::fit(X, y, static_cast<std::size_t>(hp.hidden), hp.epochs, hp.nn_rate, hp.momentum,
                                     hp.nn_l2, seed);
      break;
  }

  std::size_t correct = 0;
  for (std::size_t i = 0; i < X.size(); ++i)
    correct += model.predict_encoded(X[i]).label == y[i] ? 1 : 0;
  model.train_accuracy_ = static_cast<double>(correct) / static_cast<double>(train_set.size());
  return model;
}

}  // namespace sensecf
