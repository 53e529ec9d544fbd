#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sensecf/core.hpp"

namespace sensecf {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double predict(const std::vector<double>& x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0) {
      idx = x[static_cast<std::size_t>(nodes[idx].feature)] <= nodes[idx].threshold ? nodes[idx].left
                                                                                    : nodes[idx].right;
    }
    return nodes[idx].value;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& n : nodes) arr.push_back({n.feature, n.threshold, n.left, n.right, n.value});
    return arr;
  }

  static Tree from_json(const nlohmann::json& arr) {
    Tree tree;
    for (const auto& item : arr) {
      TreeNode n;
      n.feature = item[0].get<int>();
      n.threshold = item[1].get<double>();
      n.left = item[2].get<int>();
      n.right = item[3].get<int>();
      n.value = item[4].get<double>();
      tree.nodes.push_back(n);
    }
    return tree;
  }
};

namespace detail {

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

inline double gini(double pos, double total) {
  if (total <= 0.0) return 0.0;
  const double p = pos / total;
  return 2.0 * p * (1.0 - p);
}

/// Best gini split over the given candidate features; gain strictly > 0
/// required, first strictly better candidate wins ties.
inline SplitChoice best_gini_split(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                                   const std::vector<std::size_t>& rows, const std::vector<std::size_t>& features) {
  SplitChoice best;
  const double total = static_cast<double>(rows.size());
  double total_pos = 0.0;
  for (std::size_t r : rows) total_pos += y[r];
  const double parent = gini(total_pos, total);

  std::vector<std::pair<double, int>> column;
  column.reserve(rows.size());
  for (std::size_t f : features) {
    column.clear();
    for (std::size_t r : rows) column.emplace_back(X[r][f], y[r]);
    std::sort(column.begin(), column.end());
    double left_n = 0.0, left_pos = 0.0;
    for (std::size_t k = 0; k + 1 < column.size(); ++k) {
      left_n += 1.0;
      left_pos += column[k].second;
      if (column[k].first == column[k + 1].first) continue;
      const double right_n = total - left_n;
      const double right_pos = total_pos - left_pos;
      const double weighted =
          (left_n / total) * gini(left_pos, left_n) + (right_n / total) * gini(right_pos, right_n);
      const double gain = parent - weighted;
      if (gain > best.gain + 1e-15) {
        best.gain = gain;
        best.feature = static_cast<int>(f);
        best.threshold = 0.5 * (column[k].first + column[k + 1].first);
      }
    }
  }
  return best;
}

}  // namespace detail

/// Bagged CART classification trees: gini splits, sqrt(d) feature subsampling
/// per node, bootstrap rows per tree. Score is the mean leaf positive
/// fraction across trees.
struct Forest {
  std::vector<Tree> trees;

  static Forest fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y, int n_trees, int max_depth,
                    int min_leaf, std::uint64_t seed) {
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    const std::size_t subsample = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(
                                                               static_cast<double>(d)))));
    Rng root_rng(seed);
    Forest forest;
    forest.trees.reserve(static_cast<std::size_t>(n_trees));
    std::vector<std::size_t> all_features(d);
    for (std::size_t f = 0; f < d; ++f) all_features[f] = f;

    for (int t = 0; t < n_trees; ++t) {
      Rng rng = root_rng.fork(static_cast<std::uint64_t>(t));
      std::vector<std::size_t> rows(n);
      for (std::size_t i = 0; i < n; ++i) rows[i] = rng.below(n);
      std::sort(rows.begin(), rows.end());

      Tree tree;
      struct Pending {
        std::vector<std::size_t> rows;
        int node;
        int depth;
      };
      std::vector<Pending> stack;
      tree.nodes.emplace_back();
      stack.push_back({std::move(rows), 0, 0});
      while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        TreeNode& node = tree.nodes[static_cast<std::size_t>(job.node)];
        double pos = 0.0;
        for (std::size_t r : job.rows) pos += y[r];
        node.value = pos / static_cast<double>(job.rows.size());
        const bool pure = pos == 0.0 || pos == static_cast<double>(job.rows.size());
        if (pure || job.depth >= max_depth || job.rows.size() < static_cast<std::size_t>(2 * min_leaf) ||
            job.rows.size() < 2)
          continue;

        std::vector<std::size_t> feats = all_features;
        for (std::size_t k = 0; k < subsample; ++k) std::swap(feats[k], feats[k + rng.below(d - k)]);
        feats.resize(subsample);
        std::sort(feats.begin(), feats.end());
        const auto choice = detail::best_gini_split(X, y, job.rows, feats);
        if (choice.feature < 0) continue;

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : job.rows)
          (X[r][static_cast<std::size_t>(choice.feature)] <= choice.threshold ? left_rows : right_rows).push_back(r);
        if (left_rows.size() < static_cast<std::size_t>(min_leaf) ||
            right_rows.size() < static_cast<std::size_t>(min_leaf))
          continue;

        const int left = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const int right = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        TreeNode& parent = tree.nodes[static_cast<std::size_t>(job.node)];
        parent.feature = choice.feature;
        parent.threshold = choice.threshold;
        parent.left = left;
        parent.right = right;
        stack.push_back({std::move(right_rows), right, job.depth + 1});
        stack.push_back({std::move(left_rows), left, job.depth + 1});
      }
      forest.trees.push_back(std::move(tree));
    }
    return forest;
  }

  double score(const std::vector<double>& x) const {
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(x);
    return sum / static_cast<double>(trees.size());
  }
};

/// Gradient-boosted depth-limited regression trees with logistic loss and
/// Newton leaf values. Fully deterministic: exact greedy splits, no sampling.
struct Gbt {
  double base_score = 0.0;  // log-odds prior
  double learning_rate = 0.1;
  std::vector<Tree> trees;

  static Gbt fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y, int rounds, int depth,
                 double learning_rate) {
    const std::size_t n = X.size();
    Gbt model;
    model.learning_rate = learning_rate;
    double pos = 0.0;
    for (int label : y) pos += label;
    const double prior = std::min(std::max(pos / static_cast<double>(n), 1e-9), 1.0 - 1e-9);
    model.base_score = std::log(prior / (1.0 - prior));

    std::vector<double> margin(n, model.base_score);
    std::vector<double> grad(n), hess(n);
    for (int round = 0; round < rounds; ++round) {
      for (std::size_t i = 0; i < n; ++i) {
        const double p = 1.0 / (1.0 + std::exp(-margin[i]));
        grad[i] = static_cast<double>(y[i]) - p;  // negative gradient of logistic loss
        hess[i] = std::max(p * (1.0 - p), 1e-12);
      }
      Tree tree = fit_regression_tree(X, grad, hess, depth);
      for (std::size_t i = 0; i < n; ++i) margin[i] += learning_rate * tree.predict(X[i]);
      model.trees.push_back(std::move(tree));
    }
    return model;
  }

  double score(const std::vector<double>& x) const {
    double margin = base_score;
    for (const auto& tree : trees) margin += learning_rate * tree.predict(x);
    return 1.0 / (1.0 + std::exp(-margin));
  }

 private:
  static Tree fit_regression_tree(const std::vector<std::vector<double>>& X, const std::vector<double>& grad,
                                  const std::vector<double>& hess, int max_depth) {
    const std::size_t d = X[0].size();
    Tree tree;
    struct Pending {
      std::vector<std::size_t> rows;
      int node;
      int depth;
    };
    std::vector<std::size_t> all_rows(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) all_rows[i] = i;
    std::vector<Pending> stack;
    tree.nodes.emplace_back();
    stack.push_back({std::move(all_rows), 0, 0});

    std::vector<std::pair<double, std::size_t>> column;
    while (!stack.empty()) {
      Pending job = std::move(stack.back());
      stack.pop_back();
      double g_total = 0.0, h_total = 0.0;
      for (std::size_t r : job.rows) {
        g_total += grad[r];
        h_total += hess[r];
      }
      tree.nodes[static_cast<std::size_t>(job.node)].value = g_total / (h_total + 1e-12);
      if (job.depth >= max_depth || job.rows.size() < 2) continue;

      const double parent_score = g_total * g_total / (h_total + 1e-12);
      int best_feature = -1;
      double best_threshold = 0.0, best_gain = 1e-12;
      for (std::size_t f = 0; f < d; ++f) {
        column.clear();
        for (std::size_t r : job.rows) column.emplace_back(X[r][f], r);
        std::sort(column.begin(), column.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        double g_left = 0.0, h_left = 0.0;
        for (std::size_t k = 0; k + 1 < column.size(); ++k) {
          g_left += grad[column[k].second];
          h_left += hess[column[k].second];
          if (column[k].first == column[k + 1].first) continue;
          const double g_right = g_total - g_left;
          const double h_right = h_total - h_left;
          const double gain =
              g_left * g_left / (h_left + 1e-12) + g_right * g_right / (h_right + 1e-12) - parent_score;
          if (gain > best_gain + 1e-15) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (column[k].first + column[k + 1].first);
          }
        }
      }
      if (best_feature < 0) continue;

      std::vector<std::size_t> left_rows, right_rows;
      for (std::size_t r : job.rows)
        (X[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_rows : right_rows).push_back(r);
      if (left_rows.empty() || right_rows.empty()) continue;

      const int left = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      const int right = static_cast<int>(tree.nodes.size());
      tree.nodes.emplace_back();
      TreeNode& parent = tree.nodes[static_cast<std::size_t>(job.node)];
      parent.feature = best_feature;
      parent.threshold = best_threshold;
      parent.left = left;
      parent.right = right;
      stack.push_back({std::move(right_rows), right, job.depth + 1});
      stack.push_back({std::move(left_rows), left, job.depth + 1});
    }
    return tree;
  }
};

}  // namespace sensecf
