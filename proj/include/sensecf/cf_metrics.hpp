#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "sensecf/cf.hpp"

namespace sensecf {

constexpr double kSparsityEpsilon = 1e-6;  // normalized-units threshold for "changed"

namespace detail {

/// Min-max-normalized difference for continuous feature i; a degenerate
/// bound (min == max) contributes 0.
inline double normalized_diff(const Instance& a, const Instance& b, const Bounds& bounds, std::size_t i) {
  const double width = bounds.width(i);
  if (width <= 0.0) return 0.0;
  return (as_number(a.values[i]) - as_number(b.values[i])) / width;
}

}  // namespace detail

/// L2 norm of the min-max-normalized continuous differences plus the Hamming
/// count of differing categorical tokens.
inline double distance(const Instance& x, const Instance& x_cf, const FeatureSchema& schema, const Bounds& bounds) {
  check_arity(schema, x);
  check_arity(schema, x_cf);
  double sq = 0.0;
  double hamming = 0.0;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    if (schema.predictor(i).is_continuous()) {
      const double d = detail::normalized_diff(x, x_cf, bounds, i);
      sq += d * d;
    } else if (as_token(x.values[i]) != as_token(x_cf.values[i])) {
      hamming += 1.0;
    }
  }
  return std::sqrt(sq) + hamming;
}

/// Number of features changed in one pair; continuous features count as
/// changed iff the normalized absolute difference exceeds epsilon.
inline std::size_t changed_feature_count(const Instance& x, const Instance& x_cf, const FeatureSchema& schema,
                                         const Bounds& bounds, double epsilon = kSparsityEpsilon) {
  check_arity(schema, x);
  check_arity(schema, x_cf);
  std::size_t count = 0;
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    if (schema.predictor(i).is_continuous()) {
      if (std::abs(detail::normalized_diff(x, x_cf, bounds, i)) > epsilon) ++count;
    } else if (as_token(x.values[i]) != as_token(x_cf.values[i])) {
      ++count;
    }
  }
  return count;
}

/// Average number of feature changes per counterfactual.
inline double sparsity(const CfBatch& batch, const FeatureSchema& schema, const Bounds& bounds,
                       double epsilon = kSparsityEpsilon) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "sparsity of an empty batch");
  double total = 0.0;
  for (const auto& pair : batch.pairs)
    total += static_cast<double>(changed_feature_count(pair.factual, pair.counterfactual, schema, bounds, epsilon));
  return total / static_cast<double>(batch.size());
}

/// Fraction of pairs whose recorded counterfactual prediction differs from
/// the factual prediction.
inline double validity(const CfBatch& batch) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "validity of an empty batch");
  std::size_t flips = 0;
  for (const auto& pair : batch.pairs) flips += pair.flipped() ? 1 : 0;
  return static_cast<double>(flips) / static_cast<double>(batch.size());
}

/// Fraction of pairs whose counterfactual lies entirely within the reference
/// feature ranges: every continuous value inside [min, max], every
/// categorical token inside the observed domain.
inline double plausibility(const CfBatch& batch, const FeatureSchema& schema, const Bounds& bounds) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "plausibility of an empty batch");
  std::size_t in_range = 0;
  for (const auto& pair : batch.pairs) in_range += bounds.contains(schema, pair.counterfactual) ? 1 : 0;
  return static_cast<double>(in_range) / static_cast<double>(batch.size());
}

/// Spread of counterfactual values per mutable feature: population standard
/// deviation of the min-max-normalized value for continuous features, one
/// minus the modal category frequency for categoricals.
inline std::vector<std::pair<std::string, double>> diversity_profile(const CfBatch& batch,
                                                                     const FeatureSchema& schema,
                                                                     const Bounds& bounds) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "diversity of an empty batch");
  std::vector<std::pair<std::string, double>> profile;
  const double n = static_cast<double>(batch.size());
  for (std::size_t i = 0; i < schema.predictor_count(); ++i) {
    const FeatureSpec& spec = schema.predictor(i);
    if (!spec.is_mutable) continue;
    double value = 0.0;
    if (spec.is_continuous()) {
      const double width = bounds.width(i);
      double mean = 0.0;
      for (const auto& pair : batch.pairs) {
        const double v = width > 0.0 ? (as_number(pair.counterfactual.values[i]) - bounds.entries[i].lo) / width : 0.0;
        mean += v;
      }
      mean /= n;
      double var = 0.0;
      for (const auto& pair : batch.pairs) {
        const double v = width > 0.0 ? (as_number(pair.counterfactual.values[i]) - bounds.entries[i].lo) / width : 0.0;
        var += (v - mean) * (v - mean);
      }
      value = std::sqrt(var / n);
    } else {
      std::map<std::string, std::size_t> counts;
      for (const auto& pair : batch.pairs) ++counts[as_token(pair.counterfactual.values[i])];
      std::size_t modal = 0;
      for (const auto& [token, count] : counts) modal = std::max(modal, count);
      value = 1.0 - static_cast<double>(modal) / n;
    }
    profile.emplace_back(spec.name, value);
  }
  return profile;
}

struct CfReport {
  double validity = 0.0;
  double mean_distance = 0.0;
  double mean_sparsity = 0.0;
  double plausibility = 0.0;
  std::vector<std::pair<std::string, double>> diversity;
  double failure_rate = 0.0;
  std::size_t pair_count = 0;
  std::size_t failure_count = 0;
};

/// Recomputes predictions through the model for auditability (a mismatch
/// against the stored predictions signals pipeline corruption), then fills
/// every metric field.
inline CfReport evaluate_batch(const CfBatch& batch, const TrainedModel& model, const FeatureSchema& schema,
                               const Bounds& bounds) {
  if (batch.empty()) fail(ErrorCode::EmptyBatch, "evaluate_batch on an empty batch");
  for (std::size_t k = 0; k < batch.pairs.size(); ++k) {
    const CfPair& pair = batch.pairs[k];
    const Prediction f = model.predict(pair.factual);
    const Prediction c = model.predict(pair.counterfactual);
    if (f.label != pair.factual_pred.label || c.label != pair.cf_pred.label ||
        std::abs(f.score - pair.factual_pred.score) > 1e-9 || std::abs(c.score - pair.cf_pred.score) > 1e-9)
      fail(ErrorCode::PredictionMismatch, "pair " + std::to_string(k) + " does not match the model's predictions");
  }
  CfReport report;
  report.validity = validity(batch);
  double total = 0.0;
  for (const auto& pair : batch.pairs) total += distance(pair.factual, pair.counterfactual, schema, bounds);
  report.mean_distance = total / static_cast<double>(batch.size());
  report.mean_sparsity = sparsity(batch, schema, bounds);
  report.plausibility = plausibility(batch, schema, bounds);
  report.diversity = diversity_profile(batch, schema, bounds);
  report.pair_count = batch.size();
  report.failure_count = batch.failures;
  report.failure_rate = static_cast<double>(batch.failures) /
                        static_cast<double>(batch.size() + batch.failures);
  return report;
}

}  // namespace sensecf
