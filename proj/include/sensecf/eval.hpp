#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "sensecf/model.hpp"

namespace sensecf {

/// Area under the ROC curve via the Mann-Whitney rank statistic. Tied scores
/// receive averaged ranks, so a tie between a positive and a negative counts
/// one half.
inline double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) fail(ErrorCode::ArityMismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (int y : labels) n_pos += y == 1 ? 1 : 0;
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) fail(ErrorCode::SingleClass, "auc needs both classes");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t k = i; k < j; ++k)
      if (labels[order[k]] == 1) pos_rank_sum += avg_rank;
    i = j;
  }
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

struct ClassReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.0;
};

/// Accuracy, precision, recall, F1 (positive class = 1, zero denominators
/// reported as 0) and AUC of the model on a labeled test set.
inline ClassReport classification_report(const TrainedModel& model, const Dataset& test_set) {
  if (test_set.empty()) fail(ErrorCode::EmptyTestSet, "test set is empty");
  std::vector<double> scores;
  scores.reserve(test_set.size());
  double tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < test_set.size(); ++i) {
    const Prediction pred = model.predict(test_set.rows[i]);
    scores.push_back(pred.score);
    if (pred.label == 1) {
      (test_set.labels[i] == 1 ? tp : fp) += 1;
    } else {
      (test_set.labels[i] == 1 ? fn : tn) += 1;
    }
  }
  ClassReport report;
  report.accuracy = (tp + tn) / static_cast<double>(test_set.size());
  report.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
  report.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
  report.f1 = (report.precision + report.recall) > 0.0
                  ? 2.0 * report.precision * report.recall / (report.precision + report.recall)
                  : 0.0;
  report.auc = auc(scores, test_set.labels);
  return report;
}

}  // namespace sensecf
