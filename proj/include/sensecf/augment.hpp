#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sensecf/eval.hpp"
#include "sensecf/llm.hpp"

namespace sensecf {

enum class AugMethod { None, LlmZero, LlmFew, Both, Nice, Cfnow, Dice };

inline const char* aug_method_name(AugMethod method) {
  switch (method) {
    case AugMethod::None: return "none";
    case AugMethod::LlmZero: return "llm-zero";
    case AugMethod::LlmFew: return "llm-few";
    case AugMethod::Both: return "both";
    case AugMethod::Nice: return "nice";
    case AugMethod::Cfnow: return "cfnow";
    case AugMethod::Dice: return "dice";
  }
  return "unknown";
}

inline AugMethod aug_method_from_name(const std::string& name) {
  if (name == "none") return AugMethod::None;
  if (name == "llm-zero") return AugMethod::LlmZero;
  if (name == "llm-few") return AugMethod::LlmFew;
  if (name == "both") return AugMethod::Both;
  if (name == "nice") return AugMethod::Nice;
  if (name == "cfnow") return AugMethod::Cfnow;
  if (name == "dice") return AugMethod::Dice;
  fail(ErrorCode::Config, "unknown augmentation method '" + name + "'");
}

struct AugPolicy {
  std::vector<AugMethod> sources;      // "both" expands to llm-zero + llm-few
  std::optional<std::size_t> cap;      // max counterfactual rows added
};

/// Label for an augmentation row: the model's prediction on the
/// counterfactual (the desired class for any valid pair). Pairs that did not
/// flip are rejected, never labeled.
inline int label_cf(const CfPair& pair) {
  if (!pair.flipped()) fail(ErrorCode::NotValidCf, "pair did not flip the prediction");
  return pair.cf_pred.label;
}

struct AugmentedDataset {
  Dataset data;
  std::vector<std::string> provenance;  // "train" or the source method per row
};

/// Training set plus labeled valid counterfactuals from the selected
/// sources, skipping rows that exactly duplicate an existing labeled row.
inline AugmentedDataset build_augmented(const Dataset& train, const std::map<AugMethod, CfBatch>& batches,
                                        const AugPolicy& policy) {
  AugmentedDataset out;
  out.data = train;
  out.provenance.assign(train.size(), "train");

  std::vector<AugMethod> sources;
  for (AugMethod m : policy.sources) {
    if (m == AugMethod::Both) {
      sources.push_back(AugMethod::LlmZero);
      sources.push_back(AugMethod::LlmFew);
    } else if (m != AugMethod::None) {
      sources.push_back(m);
    }
  }

  auto duplicate_of_existing = [&](const Instance& x, int label) {
    for (std::size_t r = 0; r < out.data.size(); ++r)
      if (out.data.labels[r] == label && out.data.rows[r] == x) return true;
    return false;
  };

  std::size_t added = 0;
  for (AugMethod source : sources) {
    auto it = batches.find(source);
    if (it == batches.end()) fail(ErrorCode::Config, std::string("no batch for source ") + aug_method_name(source));
    for (const auto& pair : it->second.pairs) {
      if (!pair.flipped()) continue;
      if (policy.cap && added >= *policy.cap) break;
      check_arity(train.schema, pair.counterfactual);
      const int label = label_cf(pair);
      if (duplicate_of_existing(pair.counterfactual, label)) continue;
      out.data.rows.push_back(pair.counterfactual);
      out.data.labels.push_back(label);
      out.provenance.push_back(aug_method_name(source));
      ++added;
    }
  }
  return out;
}

struct ExperimentCell {
  std::string model;
  std::string method;
  std::optional<ClassReport> report;
  std::string error;
};

struct ExperimentReport {
  std::vector<ExperimentCell> cells;
  std::uint64_t seed = 0;
  double split_fraction = 0.0;
  std::string dataset_id;
};

/// Knobs for the experiment grid that are not part of the core signature.
struct ExperimentContext {
  Hyperparams hyperparams;
  std::shared_ptr<const LlmTransport> transport;  // llm methods; defaults to a mock on the train split
  PromptSpec prompt;
  GenConfig gen;
  SearchBudget budget;
  DiceWeights weights;
  bool minority_only = false;  // restrict factuals to the majority class
  std::optional<std::size_t> cap;
};

/// One stratified split, counterfactuals from training instances only, one
/// retrain + test evaluation per (model kind, method) cell. The un-augmented
/// baseline row is always present. Counterfactuals are generated against a
/// reference tree ensemble so every model kind shares the same batches.
inline ExperimentReport run_experiment(const Dataset& dataset, const std::vector<ModelKind>& model_kinds,
                                       const std::vector<AugMethod>& methods, std::uint64_t seed,
                                       double split_fraction, const ExperimentContext& ctx = {}) {
  if (model_kinds.empty()) fail(ErrorCode::Config, "at least one model kind required");
  auto [train_split, test_split] = split(dataset, split_fraction, seed, true);

  const TrainedModel reference = train(ModelKind::TreeEnsemble, train_split, ctx.hyperparams, seed);
  const Bounds bounds = feature_bounds(train_split);

  std::vector<std::size_t> factual_rows;
  if (ctx.minority_only) {
    const std::size_t pos = train_split.count_label(1);
    const int majority = pos * 2 >= train_split.size() ? 1 : 0;
    for (std::size_t r = 0; r < train_split.size(); ++r)
      if (train_split.labels[r] == majority) factual_rows.push_back(r);
  } else {
    for (std::size_t r = 0; r < train_split.size(); ++r) factual_rows.push_back(r);
  }

  std::shared_ptr<const LlmTransport> transport = ctx.transport;

  auto generate_for = [&](AugMethod method) {
    CfBatch batch;
    if (method == AugMethod::LlmZero || method == AugMethod::LlmFew) {
      if (!transport)
        transport = std::make_shared<MockTransport>(train_split, reference, ctx.gen.seed ? ctx.gen.seed : seed);
      PromptSpec spec = ctx.prompt;
      spec.shots = method == AugMethod::LlmZero ? 0 : (ctx.prompt.shots > 0 ? ctx.prompt.shots : 3);
      std::vector<Instance> factuals;
      for (std::size_t r : factual_rows) factuals.push_back(train_split.rows[r]);
      batch = generate_llm_batch(factuals, reference, *transport, train_split.schema, spec, ctx.gen, &train_split);
    } else {
      SearchBudget budget = ctx.budget;
      budget.seed = ctx.budget.seed ? ctx.budget.seed : seed;
      for (std::size_t r : factual_rows) {
        const Instance& x = train_split.rows[r];
        try {
          switch (method) {
            case AugMethod::Nice:
              batch.pairs.push_back(nice_cf(x, reference, train_split, bounds));
              break;
            case AugMethod::Cfnow:
              batch.pairs.push_back(cfnow_cf(x, reference, train_split, bounds, budget));
              break;
            case AugMethod::Dice: {
              SearchBudget row_budget = budget;
              row_budget.seed = mix64(budget.seed ^ mix64(r));
              auto pairs = dice_cfs(x, reference, train_split.schema, bounds, 1, ctx.weights, row_budget);
              if (pairs.empty()) ++batch.failures;
              else batch.pairs.push_back(std::move(pairs.front()));
              break;
            }
            default:
              break;
          }
        } catch (const Error&) {
          ++batch.failures;
        }
      }
    }
    return batch;
  };

  std::map<AugMethod, CfBatch> batches;
  std::vector<AugMethod> ordered_methods = methods;
  if (std::find(ordered_methods.begin(), ordered_methods.end(), AugMethod::None) == ordered_methods.end())
    ordered_methods.insert(ordered_methods.begin(), AugMethod::None);
  for (AugMethod method : ordered_methods) {
    if (method == AugMethod::None) continue;
    if (method == AugMethod::Both) {
      if (!batches.count(AugMethod::LlmZero)) batches[AugMethod::LlmZero] = generate_for(AugMethod::LlmZero);
      if (!batches.count(AugMethod::LlmFew)) batches[AugMethod::LlmFew] = generate_for(AugMethod::LlmFew);
    } else if (!batches.count(method)) {
      batches[method] = generate_for(method);
    }
  }

  ExperimentReport report;
  report.seed = seed;
  report.split_fraction = split_fraction;
  for (ModelKind kind : model_kinds) {
    for (AugMethod method : ordered_methods) {
      ExperimentCell cell;
      cell.model = model_kind_name(kind);
      cell.method = aug_method_name(method);
      try {
        AugPolicy policy;
        policy.sources = {method};
        policy.cap = ctx.cap;
        const AugmentedDataset augmented = build_augmented(train_split, batches, policy);
        const TrainedModel model = train(kind, augmented.data, ctx.hyperparams, seed);
        cell.report = classification_report(model, test_split);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace sensecf
