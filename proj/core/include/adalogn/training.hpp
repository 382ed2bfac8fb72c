#pragma once

// Label-smoothed cross-entropy, Adam, the epoch loop and accuracy.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adalogn/model.hpp"

namespace adalogn {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 8;
  std::size_t epochs = 50;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  double clip_norm = 0.0;  // global gradient norm; 0 disables clipping
  std::size_t eval_every = 1;
  std::uint64_t seed = 0;
};

/// Throws ConfigError unless rates and sizes are in range.
void validate(const TrainConfig& cfg);

class TrainingError : public Error {
 public:
  using Error::Error;
};

/// -(1-gamma) log p[gold] - (gamma/|O|) sum_i log p[i], p = softmax(scores).
/// Throws Error when gold is out of range.
Tensor loss(const Tensor& scores, int gold, double gamma);

/// Smallest achievable loss: the entropy of the smoothed target.
double smoothed_floor(std::size_t options, double gamma);

class Adam {
 public:
  Adam(ParameterStore& params, const TrainConfig& cfg);
  /// One update from the accumulated gradients (bias-corrected moments).
  /// Returns the global gradient norm before clipping.
  double step();
  [[nodiscard]] std::size_t steps() const { return t_; }

 private:
  ParameterStore& params_;
  TrainConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::size_t t_ = 0;
};

/// Lowest index among the maxima.
int argmax(const std::vector<double>& scores);

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;
  std::optional<double> dev_acc;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  ParameterStore best;  // parameters of the best dev epoch (last epoch without dev data)
  std::size_t best_epoch = 0;
  std::optional<double> best_dev_acc;
};

/// Mini-batch Adam over `train_set` with a per-epoch shuffle seeded by
/// cfg.seed. Leaves the final parameters in `model`.
TrainResult train(Model& model, const std::vector<TaskInstance>& train_set,
                  const std::vector<TaskInstance>& dev_set, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Full-batch steps on one batch; returns the loss before each step.
std::vector<double> fit_batch(Model& model, const std::vector<TaskInstance>& batch,
                              const TrainConfig& cfg, std::size_t steps);

struct EvalRecord {
  std::string id;
  std::vector<double> scores;
  int predicted = 0;
  int gold = 0;
  std::vector<ForwardTrace> traces;  // filled on request
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<EvalRecord> records;
};

EvalResult evaluate(const Model& model, const std::vector<TaskInstance>& data,
                    bool with_traces = false);

}  // namespace adalogn
