#include <gtest/gtest.h>

#include <cmath>

#include "adalogn/fixtures.hpp"
#include "adalogn/ops.hpp"
#include "adalogn/synth.hpp"
#include "adalogn/training.hpp"

using namespace adalogn;

namespace {

// Direct evaluation of the smoothed cross-entropy.
double loss_oracle(const std::vector<double>& s, int gold, double gamma) {
  double mx = s[0];
  for (double x : s) mx = std::max(mx, x);
  double z = 0.0;
  for (double x : s) z += std::exp(x - mx);
  const double n = static_cast<double>(s.size());
  double out = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double logp = s[i] - mx - std::log(z);
    const double target = (static_cast<int>(i) == gold ? 1.0 - gamma : 0.0) + gamma / n;
    out -= target * logp;
  }
  return out;
}

ModelConfig tiny_model(std::uint64_t seed) {
  ModelConfig cfg;
  cfg.d = 8;
  cfg.iterations = 1;
  cfg.seed = seed;
  cfg.embedding = EmbeddingMode::hash;
  return cfg;
}

std::vector<TaskInstance> small_set(std::size_t n, std::uint64_t seed) {
  GeneratorSpec spec;
  spec.seed = seed;
  return generate(n, spec);
}

}  // namespace

TEST(Loss, MatchesOracle) {
  const std::vector<std::vector<double>> cases{
      {0.0, 0.0, 0.0, 0.0}, {1.0, -2.0, 0.5, 3.0}, {100.0, -100.0}, {-0.3, 0.7, 0.1}};
  for (const auto& s : cases) {
    for (int gold = 0; gold < static_cast<int>(s.size()); ++gold) {
      for (double gamma : {0.0, 0.1, 0.25, 0.9}) {
        EXPECT_NEAR(loss(Tensor::vector(s), gold, gamma).item(), loss_oracle(s, gold, gamma), 1e-12);
      }
    }
  }
}

TEST(Loss, UniformScoresGiveLogOptions) {
  for (double gamma : {0.0, 0.25}) {
    EXPECT_NEAR(loss(Tensor::vector({2.0, 2.0, 2.0, 2.0}), 1, gamma).item(), std::log(4.0), 1e-12);
  }
}

TEST(Loss, ShiftInvariant) {
  const double a = loss(Tensor::vector({0.1, 0.5, -0.2}), 2, 0.25).item();
  const double b = loss(Tensor::vector({10.1, 10.5, 9.8}), 2, 0.25).item();
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(Loss, GradientIsSoftmaxMinusTarget) {
  const std::vector<double> s{0.3, -1.0, 2.0, 0.0};
  const Tensor x = Tensor::vector(s, true);
  loss(x, 2, 0.25).backward();
  double z = 0.0;
  for (double v : s) z += std::exp(v);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double target = (i == 2 ? 0.75 : 0.0) + 0.0625;
    EXPECT_NEAR(x.grad()[i], std::exp(s[i]) / z - target, 1e-12);
  }
}

TEST(Loss, BadGoldThrows) {
  EXPECT_THROW(loss(Tensor::vector({1.0, 2.0}), 2, 0.25), Error);
  EXPECT_THROW(loss(Tensor::vector({1.0, 2.0}), -1, 0.25), Error);
}

TEST(Loss, SmoothedFloorIsEntropyOfTarget) {
  // gamma = 0.25, 4 options: target (0.8125, 0.0625 x3).
  const double h = -(0.8125 * std::log(0.8125) + 3 * 0.0625 * std::log(0.0625));
  EXPECT_NEAR(smoothed_floor(4, 0.25), h, 1e-15);
  EXPECT_DOUBLE_EQ(smoothed_floor(4, 0.0), 0.0);
  // The floor is attained at scores proportional to log target.
  const std::vector<double> s{std::log(0.8125), std::log(0.0625), std::log(0.0625), std::log(0.0625)};
  EXPECT_NEAR(loss(Tensor::vector(s), 0, 0.25).item(), h, 1e-12);
  // and never undercut.
  for (double big : {1.0, 3.0, 10.0}) {
    EXPECT_GE(loss(Tensor::vector({big, 0.0, 0.0, 0.0}), 0, 0.25).item(), h);
  }
}

TEST(AdamTest, ZeroGradientLeavesParametersUnchanged) {
  Model m(tiny_model(0));
  const ParameterStore before = m.params().clone();
  TrainConfig cfg;
  Adam adam(m.params(), cfg);
  m.params().zero_grad();
  EXPECT_DOUBLE_EQ(adam.step(), 0.0);
  EXPECT_TRUE(m.params().identical(before));
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  ParameterStore p;
  Tensor w = p.add("w", Tensor::vector({1.0, -2.0, 0.5}));
  TrainConfig cfg;
  cfg.lr = 0.01;
  Adam adam(p, cfg);
  ops::sum(ops::mul(w, Tensor::vector({3.0, -0.5, 0.0}))).backward();
  adam.step();
  // Bias correction makes the first update lr * sign(g) (up to eps).
  EXPECT_NEAR(w[0], 1.0 - 0.01, 1e-9);
  EXPECT_NEAR(w[1], -2.0 + 0.01, 1e-9);
  EXPECT_DOUBLE_EQ(w[2], 0.5);
}

TEST(AdamTest, ClipScalesGradient) {
  ParameterStore p;
  Tensor w = p.add("w", Tensor::vector({0.0, 0.0}));
  TrainConfig cfg;
  cfg.clip_norm = 1.0;
  Adam adam(p, cfg);
  ops::sum(ops::mul(w, Tensor::vector({3.0, 4.0}))).backward();
  EXPECT_DOUBLE_EQ(adam.step(), 5.0);
}

TEST(Argmax, LowestIndexWins) {
  EXPECT_EQ(argmax({1.0, 3.0, 3.0, 2.0}), 1);
  EXPECT_EQ(argmax({0.0, 0.0, 0.0, 0.0}), 0);
  EXPECT_EQ(argmax({-1.0}), 0);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(validate(c));
  c.lr = -1.0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.batch_size = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.beta2 = 1.0;
  EXPECT_THROW(validate(c), ConfigError);
}

TEST(Training, ZeroLearningRateKeepsParameters) {
  Model m(tiny_model(1));
  const ParameterStore before = m.params().clone();
  TrainConfig cfg;
  cfg.lr = 0.0;
  cfg.epochs = 1;
  const auto data = small_set(8, 1);
  const TrainResult r = train(m, data, {}, cfg);
  EXPECT_TRUE(m.params().identical(before));
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_FALSE(r.log[0].dev_acc.has_value());
  EXPECT_EQ(r.best_epoch, 1u);
}

TEST(Training, Deterministic) {
  const auto data = small_set(12, 2);
  const auto dev = small_set(8, 3);
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.batch_size = 4;
  cfg.lr = 1e-2;
  Model a(tiny_model(4)), b(tiny_model(4));
  const TrainResult ra = train(a, data, dev, cfg);
  const TrainResult rb = train(b, data, dev, cfg);
  EXPECT_TRUE(a.params().identical(b.params()));
  ASSERT_EQ(ra.log.size(), rb.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i) {
    EXPECT_EQ(ra.log[i].loss, rb.log[i].loss);
    EXPECT_EQ(ra.log[i].dev_acc, rb.log[i].dev_acc);
  }
  EXPECT_TRUE(ra.best.identical(rb.best));
}

TEST(Training, CallbackSeesEveryEpoch) {
  Model m(tiny_model(5));
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.eval_every = 2;
  std::vector<EpochRecord> seen;
  const auto data = small_set(4, 5);
  train(m, data, data, cfg, [&](const EpochRecord& r) { seen.push_back(r); });
  ASSERT_EQ(seen.size(), 3u);
  EXPECT_FALSE(seen[0].dev_acc.has_value());
  EXPECT_TRUE(seen[1].dev_acc.has_value());
  EXPECT_TRUE(seen[2].dev_acc.has_value());  // last epoch always evaluates
}

TEST(Training, EmptyTrainingSetThrows) {
  Model m(tiny_model(0));
  EXPECT_THROW(train(m, {}, {}, TrainConfig{}), TrainingError);
  EXPECT_THROW(fit_batch(m, {}, TrainConfig{}, 1), TrainingError);
}

TEST(Training, OverfitsOneBatch) {
  Model m(gradcheck_config(7));
  TrainConfig cfg;
  cfg.lr = 1e-2;
  const std::vector<TaskInstance> batch{gradcheck_instance()};
  const std::vector<double> curve = fit_batch(m, batch, cfg, 200);
  const double floor = smoothed_floor(2, m.config().gamma);
  EXPECT_GT(curve.front() - floor, 0.05);
  EXPECT_LT(curve.back() - floor, 0.05 * (curve.front() - floor));
  EXPECT_EQ(evaluate(m, batch).accuracy, 1.0);
}

TEST(Evaluate, TiesResolveToFirstOption) {
  Model m(tiny_model(6));
  for (double& x : m.params().at("scorer.out.W").mutable_data()) x = 0.0;
  const auto data = small_set(40, 6);
  const EvalResult r = evaluate(m, data, true);
  std::size_t gold0 = 0;
  for (const auto& inst : data) gold0 += inst.gold == 0 ? 1 : 0;
  EXPECT_DOUBLE_EQ(r.accuracy, static_cast<double>(gold0) / 40.0);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.25);
  for (const auto& rec : r.records) {
    EXPECT_EQ(rec.predicted, 0);
    EXPECT_EQ(rec.traces.size(), 4u);
  }
  EXPECT_DOUBLE_EQ(evaluate(m, {}).accuracy, 0.0);
}
