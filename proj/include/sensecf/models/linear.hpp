#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sensecf/core.hpp"

namespace sensecf {

/// Linear max-margin classifier trained with the hinge loss and L2 penalty
/// via stochastic subgradient descent (Pegasos-style step sizes). The margin
/// is squashed through a logistic so scores live in [0, 1].
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;

  static LinearModel fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y, double lambda,
                         int epochs, std::uint64_t seed) {
    const std::size_t n = X.size();
    const std::size_t d = X[0].size();
    LinearModel model;
    model.weights.assign(d, 0.0);
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::uint64_t t = 0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      rng.shuffle(order);
      for (std::size_t idx : order) {
        ++t;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double target = y[idx] == 1 ? 1.0 : -1.0;
        double margin = model.bias;
        for (std::size_t f = 0; f < d; ++f) margin += model.weights[f] * X[idx][f];
        const double decay = 1.0 - eta * lambda;
        for (std::size_t f = 0; f < d; ++f) model.weights[f] *= decay;
        if (target * margin < 1.0) {
          for (std::size_t f = 0; f < d; ++f) model.weights[f] += eta * target * X[idx][f];
          model.bias += eta * target;
        }
      }
    }
    return model;
  }

  double score(const std::vector<double>& x) const {
    double margin = bias;
    for (std::size_t f = 0; f < weights.size(); ++f) margin += weights[f] * x[f];
    return 1.0 / (1.0 + std::exp(-margin));
  }
};

}  // namespace sensecf
