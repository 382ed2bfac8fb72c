#include "adalogn/training.hpp"

#include <cmath>
#include <numeric>

#include "adalogn/ops.hpp"

namespace adalogn {

void validate(const TrainConfig& c) {
  if (!(c.lr >= 0.0)) throw ConfigError("lr must be non-negative");
  if (c.batch_size < 1) throw ConfigError("batch_size must be positive");
  if (c.epochs < 1) throw ConfigError("epochs must be positive");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0) || !(c.beta2 >= 0.0 && c.beta2 < 1.0)) {
    throw ConfigError("Adam betas must lie in [0, 1)");
  }
  if (!(c.adam_eps > 0.0)) throw ConfigError("adam_eps must be positive");
  if (!(c.clip_norm >= 0.0)) throw ConfigError("clip_norm must be non-negative");
  if (c.eval_every < 1) throw ConfigError("eval_every must be positive");
}

Tensor loss(const Tensor& scores, int gold, double gamma) {
  const std::size_t n = scores.numel();
  if (gold < 0 || static_cast<std::size_t>(gold) >= n) {
    throw Error("gold index " + std::to_string(gold) + " out of range for " +
                std::to_string(n) + " options");
  }
  const Tensor logp = ops::log_softmax(scores);
  const Tensor nll = ops::scale(ops::select(logp, static_cast<std::size_t>(gold)), -(1.0 - gamma));
  if (gamma == 0.0) return nll;
  return ops::add(nll, ops::scale(ops::sum(logp), -gamma / static_cast<double>(n)));
}

double smoothed_floor(std::size_t options, double gamma) {
  const double n = static_cast<double>(options);
  const double other = gamma / n;
  const double top = 1.0 - gamma + other;
  double h = -top * std::log(top);
  if (other > 0.0) h -= (n - 1.0) * other * std::log(other);
  return h;
}

Adam::Adam(ParameterStore& params, const TrainConfig& cfg) : params_(params), cfg_(cfg) {
  for (const auto& [name, t] : params_.groups()) {
    m_.emplace_back(t.numel(), 0.0);
    v_.emplace_back(t.numel(), 0.0);
  }
}

double Adam::step() {
  auto& groups = params_.groups();
  std::vector<std::vector<double>> grads;
  grads.reserve(groups.size());
  double sq = 0.0;
  for (const auto& [name, t] : groups) {
    grads.push_back(t.grad());
    for (double g : grads.back()) sq += g * g;
  }
  const double norm = std::sqrt(sq);
  const double clip = cfg_.clip_norm > 0.0 && norm > cfg_.clip_norm ? cfg_.clip_norm / norm : 1.0;

  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < groups.size(); ++k) {
    auto data = groups[k].second.mutable_data();
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double g = grads[k][i] * clip;
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      if (g == 0.0 && m[i] == 0.0) continue;
      data[i] -= cfg_.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + cfg_.adam_eps);
    }
  }
  return norm;
}

int argmax(const std::vector<double>& scores) {
  int best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

namespace {

// Mean loss over `idx`, with gradients accumulated into the parameters.
double batch_step(Model& model, const std::vector<TaskInstance>& data,
                  const std::vector<std::size_t>& idx) {
  const double gamma = model.config().gamma;
  std::vector<Tensor> losses;
  for (std::size_t i : idx) {
    const TaskInstance& inst = data[i];
    try {
      losses.push_back(loss(model.forward_instance(inst, false).scores, inst.gold, gamma));
    } catch (const NumericError& e) {
      throw TrainingError("divergence on instance '" + inst.id + "': " + e.what());
    }
  }
  const Tensor total = ops::scale(ops::sum(ops::concat(losses)),
                                  1.0 / static_cast<double>(losses.size()));
  total.backward();
  return total.item();
}

}  // namespace

TrainResult train(Model& model, const std::vector<TaskInstance>& train_set,
                  const std::vector<TaskInstance>& dev_set, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  validate(cfg);
  if (train_set.empty()) throw TrainingError("training set is empty");
  TrainResult result;
  Adam adam(model.params(), cfg);
  Rng rng(mix_seed(cfg.seed ^ 0x7472616e));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      const std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                         order.begin() + static_cast<std::ptrdiff_t>(end));
      model.params().zero_grad();
      const double l = batch_step(model, train_set, idx);
      if (!std::isfinite(l)) {
        throw TrainingError("non-finite loss in epoch " + std::to_string(epoch));
      }
      adam.step();
      weighted += l * static_cast<double>(idx.size());
    }
    model.params().zero_grad();

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = weighted / static_cast<double>(train_set.size());
    const bool eval_now = !dev_set.empty() && (epoch % cfg.eval_every == 0 || epoch == cfg.epochs);
    if (eval_now) {
      rec.dev_acc = evaluate(model, dev_set).accuracy;
      if (!result.best_dev_acc || *rec.dev_acc > *result.best_dev_acc) {
        result.best_dev_acc = rec.dev_acc;
        result.best_epoch = epoch;
        result.best = model.params().clone();
      }
    }
    result.log.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  if (dev_set.empty()) {
    result.best = model.params().clone();
    result.best_epoch = cfg.epochs;
  }
  return result;
}

std::vector<double> fit_batch(Model& model, const std::vector<TaskInstance>& batch,
                              const TrainConfig& cfg, std::size_t steps) {
  validate(cfg);
  if (batch.empty()) throw TrainingError("batch is empty");
  Adam adam(model.params(), cfg);
  std::vector<std::size_t> idx(batch.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> curve;
  for (std::size_t s = 0; s < steps; ++s) {
    model.params().zero_grad();
    curve.push_back(batch_step(model, batch, idx));
    adam.step();
  }
  model.params().zero_grad();
  return curve;
}

EvalResult evaluate(const Model& model, const std::vector<TaskInstance>& data, bool with_traces) {
  EvalResult out;
  std::size_t correct = 0;
  for (const TaskInstance& inst : data) {
    InstanceOutput o = model.forward_instance(inst, with_traces);
    EvalRecord r;
    r.id = inst.id;
    r.scores.assign(o.scores.data().begin(), o.scores.data().end());
    r.predicted = argmax(r.scores);
    r.gold = inst.gold;
    r.traces = std::move(o.traces);
    correct += r.predicted == r.gold ? 1 : 0;
    out.records.push_back(std::move(r));
  }
  out.accuracy = data.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(data.size());
  return out;
}

}  // namespace adalogn
