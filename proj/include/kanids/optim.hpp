#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "kanids/error.hpp"
#include "kanids/matrix.hpp"
#include "kanids/rng.hpp"

namespace kanids {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update over a list of parameter tensors. A fresh
/// (empty) state is sized on first use.
inline void adam_step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads,
                      AdamState& state, double lr, const AdamConfig& cfg = {}) {
  if (params.size() != grads.size()) throw Error(ErrorKind::ShapeMismatch, "parameter/gradient tensor count differs");
  if (state.first_moment.empty() && state.step == 0) {
    for (const auto& p : params) {
      state.first_moment.emplace_back(p.size(), 0.0);
      state.second_moment.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first_moment.size() != params.size()) throw Error(ErrorKind::ShapeMismatch, "optimizer state shape differs");
  for (std::size_t t = 0; t < params.size(); ++t)
    if (params[t].size() != grads[t].size() || state.first_moment[t].size() != params[t].size())
      throw Error(ErrorKind::ShapeMismatch, "tensor " + std::to_string(t) + " size differs");

  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto& m = state.first_moment[t];
    auto& v = state.second_moment[t];
    for (std::size_t i = 0; i < params[t].size(); ++i) {
      const double g = grads[t][i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      params[t][i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

/// base_lr * gamma^floor(epoch / step_size)
inline double step_lr(std::size_t epoch, double base_lr, std::size_t step_size, double gamma) {
  if (step_size == 0) return base_lr;
  return base_lr * std::pow(gamma, static_cast<double>(epoch / step_size));
}

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 512;
  double learning_rate = 0.001;
  AdamConfig adam{};
  std::size_t step_size = 10;
  double gamma = 0.5;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw Error(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning_rate must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidArgument, "gamma must be in (0, 1]");
    if (step_size < 1) throw Error(ErrorKind::InvalidArgument, "step_size must be >= 1");
  }
};

/// Row order for one epoch: Fisher-Yates under a seed derived from the run
/// seed and the epoch number.
inline std::vector<std::size_t> epoch_order(std::size_t rows, std::uint64_t seed, std::size_t epoch) {
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, epoch));
  rng.shuffle(std::span<std::size_t>(order));
  return order;
}

/// Shuffled mini-batch Adam with the step schedule. `batch_loss` maps the row
/// indices of one batch to (mean loss, gradient shaped like `net`). Returns
/// the mean training loss of every epoch.
template <typename Model, typename BatchLoss>
std::vector<double> train_loop(Model& net, std::size_t rows, const TrainConfig& config, BatchLoss&& batch_loss) {
  config.validate();
  if (rows == 0) throw Error(ErrorKind::EmptyDataset, "cannot train on an empty dataset");
  AdamState state;
  std::vector<double> trace;
  trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = step_lr(epoch, config.learning_rate, config.step_size, config.gamma);
    const auto order = epoch_order(rows, config.seed, epoch);
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      auto [loss, grad] = batch_loss(idx);
      if (!std::isfinite(loss))
        throw Error(ErrorKind::NonFinite, "non-finite training loss at epoch " + std::to_string(epoch + 1));
      total += loss * static_cast<double>(idx.size());
      adam_step(parameter_views(net), parameter_views(grad), state, lr, config.adam);
    }
    trace.push_back(total / static_cast<double>(rows));
  }
  for (const auto& view : parameter_views(net))
    for (double v : view)
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "parameter became non-finite during training");
  return trace;
}

/// Cross-entropy classification training. `Model` needs loss_and_gradient()
/// and parameter_views() overloads.
template <typename Model>
std::vector<double> train(Model& net, const Matrix& features, std::span<const int> labels,
                          const TrainConfig& config) {
  if (labels.size() != features.rows) throw Error(ErrorKind::LengthMismatch, "one label per row required");
  std::vector<int> batch_labels;
  return train_loop(net, features.rows, config, [&](std::span<const std::size_t> idx) {
    const Matrix batch = gather_rows(features, idx);
    batch_labels.resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) batch_labels[i] = labels[idx[i]];
    return loss_and_gradient(net, batch, batch_labels);
  });
}

/// Mean-squared-error regression training; needs a
/// regression_loss_and_gradient() overload for `Model`.
template <typename Model>
std::vector<double> train_regression(Model& net, const Matrix& inputs, const Matrix& targets,
                                     const TrainConfig& config) {
  if (targets.rows != inputs.rows) throw Error(ErrorKind::LengthMismatch, "one target row per input row required");
  return train_loop(net, inputs.rows, config, [&](std::span<const std::size_t> idx) {
    return regression_loss_and_gradient(net, gather_rows(inputs, idx), gather_rows(targets, idx));
  });
}

}  // namespace kanids
