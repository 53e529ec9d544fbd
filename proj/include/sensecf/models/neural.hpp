#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sensecf/core.hpp"

namespace sensecf {

/// One-hidden-layer network: rectifier hidden units, sigmoid output,
/// cross-entropy loss, full-batch gradient descent with momentum. Parameters
/// live in one flat vector laid out as [W1 (hidden x input), b1, w2, b2] so
/// the loss gradient can be checked coordinate-wise.
struct NeuralModel {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<double> params;

  static std::size_t param_count(std::size_t input_dim, std::size_t hidden_dim) {
    return hidden_dim * input_dim + hidden_dim + hidden_dim + 1;
  }

  static std::vector<double> init_params(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
    std::vector<double> p(param_count(input_dim, hidden_dim), 0.0);
    const double w1_scale = std::sqrt(2.0 / static_cast<double>(input_dim));
    const double w2_scale = std::sqrt(1.0 / static_cast<double>(hidden_dim));
    for (std::size_t i = 0; i < hidden_dim * input_dim; ++i) p[i] = w1_scale * rng.normal();
    const std::size_t w2_offset = hidden_dim * input_dim + hidden_dim;
    for (std::size_t i = 0; i < hidden_dim; ++i) p[w2_offset + i] = w2_scale * rng.normal();
    return p;
  }

  static double forward(const std::vector<double>& params, std::size_t input_dim, std::size_t hidden_dim,
                        const std::vector<double>& x) {
    const std::size_t b1_offset = hidden_dim * input_dim;
    const std::size_t w2_offset = b1_offset + hidden_dim;
    const std::size_t b2_offset = w2_offset + hidden_dim;
    double out = params[b2_offset];
    for (std::size_t h = 0; h < hidden_dim; ++h) {
      double z = params[b1_offset + h];
      const std::size_t row = h * input_dim;
      for (std::size_t i = 0; i < input_dim; ++i) z += params[row + i] * x[i];
      if (z > 0.0) out += params[w2_offset + h] * z;
    }
    return 1.0 / (1.0 + std::exp(-out));
  }

  /// Mean cross-entropy over the batch plus 0.5 * l2 * |weights|^2 (biases
  /// are not penalized).
  static double loss(const std::vector<double>& params, std::size_t input_dim, std::size_t hidden_dim,
                     const std::vector<std::vector<double>>& X, const std::vector<int>& y, double l2) {
    const double eps = 1e-12;
    double total = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
      const double p = forward(params, input_dim, hidden_dim, X[i]);
      total += y[i] == 1 ? -std::log(p + eps) : -std::log(1.0 - p + eps);
    }
    total /= static_cast<double>(X.size());
    if (l2 > 0.0) {
      const std::size_t b1_offset = hidden_dim * input_dim;
      const std::size_t w2_offset = b1_offset + hidden_dim;
      double sq = 0.0;
      for (std::size_t i = 0; i < b1_offset; ++i) sq += params[i] * params[i];
      for (std::size_t i = w2_offset; i < w2_offset + hidden_dim; ++i) sq += params[i] * params[i];
      total += 0.5 * l2 * sq;
    }
    return total;
  }

  /// Analytic gradient of loss() with respect to the flat parameter vector.
  static std::vector<double> gradient(const std::vector<double>& params, std::size_t input_dim,
                                      std::size_t hidden_dim, const std::vector<std::vector<double>>& X,
                                      const std::vector<int>& y, double l2) {
    const std::size_t b1_offset = hidden_dim * input_dim;
    const std::size_t w2_offset = b1_offset + hidden_dim;
    const std::size_t b2_offset = w2_offset + hidden_dim;
    std::vector<double> grad(params.size(), 0.0);
    std::vector<double> hidden(hidden_dim);
    const double inv_n = 1.0 / static_cast<double>(X.size());

    for (std::size_t i = 0; i < X.size(); ++i) {
      const std::vector<double>& x = X[i];
      double out = params[b2_offset];
      for (std::size_t h = 0; h < hidden_dim; ++h) {
        double z = params[b1_offset + h];
        const std::size_t row = h * input_dim;
        for (std::size_t f = 0; f < input_dim; ++f) z += params[row + f] * x[f];
        hidden[h] = z > 0.0 ? z : 0.0;
        out += params[w2_offset + h] * hidden[h];
      }
      const double p = 1.0 / (1.0 + std::exp(-out));
      const double delta_out = (p - static_cast<double>(y[i])) * inv_n;  // d(mean CE)/d(logit)

      grad[b2_offset] += delta_out;
      for (std::size_t h = 0; h < hidden_dim; ++h) {
        grad[w2_offset + h] += delta_out * hidden[h];
        if (hidden[h] > 0.0) {
          const double delta_h = delta_out * params[w2_offset + h];
          grad[b1_offset + h] += delta_h;
          const std::size_t row = h * input_dim;
          for (std::size_t f = 0; f < input_dim; ++f) grad[row + f] += delta_h * x[f];
        }
      }
    }
    if (l2 > 0.0) {
      for (std::size_t i = 0; i < b1_offset; ++i) grad[i] += l2 * params[i];
      for (std::size_t i = w2_offset; i < w2_offset + hidden_dim; ++i) grad[i] += l2 * params[i];
    }
    return grad;
  }

  static NeuralModel fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y, std::size_t hidden_dim,
                         int epochs, double learning_rate, double momentum, double l2, std::uint64_t seed) {
    NeuralModel model;
    model.input_dim = X[0].size();
    model.hidden_dim = hidden_dim;
    Rng rng(seed);
    model.params = init_params(model.input_dim, hidden_dim, rng);
    std::vector<double> velocity(model.params.size(), 0.0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
      const auto grad = gradient(model.params, model.input_dim, hidden_dim, X, y, l2);
      for (std::size_t i = 0; i < model.params.size(); ++i) {
        velocity[i] = momentum * velocity[i] - learning_rate * grad[i];
        model.params[i] += velocity[i];
      }
    }
    return model;
  }

  double score(const std::vector<double>& x) const { return forward(params, input_dim, hidden_dim, x); }
};

}  // namespace sensecf
