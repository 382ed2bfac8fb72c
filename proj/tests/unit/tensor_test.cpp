#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "adalogn/gradcheck.hpp"
#include "adalogn/ops.hpp"
#include "adalogn/params.hpp"

namespace adalogn {
namespace {

using namespace ops;

TEST(Tensor, Factories) {
  const Tensor z = Tensor::zeros({2, 3});
  EXPECT_EQ(z.shape(), (Shape{2, 3}));
  EXPECT_EQ(z.numel(), 6u);
  EXPECT_DOUBLE_EQ(Tensor::scalar(2.5).item(), 2.5);
  EXPECT_THROW(Tensor::from({2, 2}, {1, 2, 3}), ShapeError);
  EXPECT_THROW((void)z.item(), ShapeError);
}

TEST(Tensor, NonFiniteValuesAreTrapped) {
  EXPECT_THROW(Tensor::vector({1.0, NAN}), NumericError);
  const Tensor big = Tensor::vector({1e308});
  EXPECT_THROW((void)add(big, big), NumericError);
}

TEST(Ops, ShapeMismatch) {
  EXPECT_THROW((void)add(Tensor::vector({1, 2}), Tensor::vector({1, 2, 3})), ShapeError);
  EXPECT_THROW((void)matvec(Tensor::zeros({2, 3}), Tensor::vector({1, 2})), ShapeError);
  EXPECT_THROW((void)matmul(Tensor::zeros({2, 3}), Tensor::zeros({2, 3})), ShapeError);
  EXPECT_THROW((void)slice(Tensor::vector({1, 2}), 1, 2), ShapeError);
  EXPECT_THROW((void)stack({Tensor::vector({1}), Tensor::vector({1, 2})}), ShapeError);
}

TEST(Ops, SoftmaxValues) {
  const Tensor s = softmax(Tensor::vector({3, 3, 3, 3}));
  for (double v : s.data()) EXPECT_DOUBLE_EQ(v, 0.25);
  const Tensor ls = log_softmax(Tensor::vector({1000, 0}));
  EXPECT_NEAR(ls[0], 0.0, 1e-12);
  EXPECT_NEAR(ls[1], -1000.0, 1e-9);
}

TEST(Ops, SoftmaxRowsSumToOne) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t rows = 1 + rng.index(4), cols = 1 + rng.index(9);
    std::vector<double> v(rows * cols);
    for (double& x : v) x = rng.uniform(-30, 30);
    const Tensor s = softmax(Tensor::from({rows, cols}, v));
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        EXPECT_GE(s[r * cols + c], 0.0);
        total += s[r * cols + c];
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(Ops, ActivationValues) {
  EXPECT_DOUBLE_EQ(sigmoid(Tensor::scalar(0)).item(), 0.5);
  EXPECT_DOUBLE_EQ(tanh(Tensor::scalar(0)).item(), 0.0);
  EXPECT_DOUBLE_EQ(relu(Tensor::vector({-1, 2}))[0], 0.0);
  EXPECT_DOUBLE_EQ(leaky_relu(Tensor::vector({-2}))[0], -2 * kLeakySlope);
}

TEST(Ops, Shaping) {
  const Tensor m = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor r = row(m, 1);
  EXPECT_EQ(std::vector<double>(r.data().begin(), r.data().end()), (std::vector<double>{4, 5, 6}));
  const Tensor t = transpose(m);
  EXPECT_EQ(t.shape(), (Shape{3, 2}));
  EXPECT_DOUBLE_EQ(t[1], 4);
  const Tensor sel = index_select(m, {1, 1, 0});
  EXPECT_EQ(sel.shape(), (Shape{3, 3}));
  EXPECT_DOUBLE_EQ(sel[6], 1);
  const Tensor c = concat({Tensor::vector({1}), m});
  EXPECT_EQ(c.shape(), (Shape{7}));
  EXPECT_DOUBLE_EQ(take(c, {6, 0})[0], 6);
  EXPECT_DOUBLE_EQ(select(c, 3).item(), 3);
}

TEST(Backward, LinearMapGrad) {
  const Tensor w = Tensor::from({2, 3}, {1, 2, 3, 4, 5, 6}, true);
  const Tensor x = Tensor::vector({0.5, -1, 2});
  sum(matvec(w, x)).backward();
  EXPECT_EQ(w.grad(), (std::vector<double>{0.5, -1, 2, 0.5, -1, 2}));
}

TEST(Backward, MeanGrad) {
  const Tensor x = Tensor::vector({1, 2, 3, 4}, true);
  mean(x).backward();
  for (double g : x.grad()) EXPECT_DOUBLE_EQ(g, 0.25);
}

TEST(Backward, DisconnectedLeafHasZeroGrad) {
  const Tensor x = Tensor::vector({1, 2}, true);
  const Tensor y = Tensor::vector({3, 4}, true);
  sum(x).backward();
  EXPECT_EQ(y.grad(), (std::vector<double>{0, 0}));
  EXPECT_FALSE(y.has_grad());
}

TEST(Backward, AccumulatesAcrossCalls) {
  Tensor x = Tensor::vector({1, 2}, true);
  const Tensor loss = sum(mul(x, x));
  loss.backward();
  loss.backward();
  EXPECT_EQ(x.grad(), (std::vector<double>{4, 8}));
  x.zero_grad();
  EXPECT_EQ(x.grad(), (std::vector<double>{0, 0}));
}

TEST(Backward, SharedSubexpression) {
  const Tensor x = Tensor::scalar(3, true);
  const Tensor y = mul(x, x);
  add(y, y).backward();
  EXPECT_DOUBLE_EQ(x.grad()[0], 12);
}

TEST(Backward, RequiresScalar) {
  const Tensor x = Tensor::vector({1, 2}, true);
  EXPECT_THROW(x.backward(), ShapeError);
}

TEST(Backward, DetachStopsGradient) {
  const Tensor x = Tensor::vector({1, 2}, true);
  sum(mul(x.detach(), x)).backward();
  EXPECT_EQ(x.grad(), (std::vector<double>{1, 2}));
}

// Finite-difference checks of every primitive on random inputs.
struct PrimitiveCase {
  const char* name;
  std::function<Tensor(const ParameterStore&)> f;
};

class Primitives : public ::testing::TestWithParam<PrimitiveCase> {};

TEST_P(Primitives, MatchFiniteDifferences) {
  Rng rng(11);
  ParameterStore p;
  p.add("a", {3, 4}, Init::unit_uniform, rng);
  p.add("b", {3, 4}, Init::unit_uniform, rng);
  p.add("v", {4}, Init::unit_uniform, rng);
  p.add("u", {3}, Init::unit_uniform, rng);
  p.add("s", {1}, Init::unit_uniform, rng);
  p.add("w", {4, 4}, Init::unit_uniform, rng);
  p.add("h", {2}, Init::unit_uniform, rng);
  const auto f = GetParam().f;
  const auto report = finite_diff_check([&] { return f(p); }, p, {1e-5, 1e-6, 1e-3, 0});
  EXPECT_TRUE(report.passed) << GetParam().name << "\n" << to_string(report);
}

// Contracts an output with fixed weights so every element matters.
Tensor contract(const Tensor& t) {
  std::vector<double> w(t.numel());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
  return sum(mul(concat({t}), Tensor::vector(w)));
}

GruWeights gru(const ParameterStore& p) {
  const Tensor w = p.at("w");
  const auto blk = [&](std::size_t r, std::size_t c) {
    return stack({slice(row(w, r), c, 2), slice(row(w, r + 1), c, 2)});
  };
  return {blk(0, 0), blk(0, 2), blk(2, 0), blk(2, 2), blk(1, 1), blk(1, 2),
          slice(p.at("v"), 0, 2), slice(p.at("v"), 1, 2), slice(p.at("v"), 2, 2),
          slice(p.at("u"), 0, 2), slice(p.at("u"), 1, 2), slice(p.at("h"), 0, 2)};
}

INSTANTIATE_TEST_SUITE_P(
    Ops, Primitives,
    ::testing::Values(
        PrimitiveCase{"add", [](const ParameterStore& p) { return contract(add(p.at("a"), p.at("b"))); }},
        PrimitiveCase{"sub", [](const ParameterStore& p) { return contract(sub(p.at("a"), p.at("b"))); }},
        PrimitiveCase{"mul", [](const ParameterStore& p) { return contract(mul(p.at("a"), p.at("b"))); }},
        PrimitiveCase{"scale", [](const ParameterStore& p) { return contract(scale(p.at("a"), -1.5)); }},
        PrimitiveCase{"mul_scalar",
                      [](const ParameterStore& p) { return contract(mul_scalar(p.at("v"), p.at("s"))); }},
        PrimitiveCase{"matvec", [](const ParameterStore& p) { return contract(matvec(p.at("a"), p.at("v"))); }},
        PrimitiveCase{"matmul",
                      [](const ParameterStore& p) { return contract(matmul(p.at("a"), p.at("w"))); }},
        PrimitiveCase{"linear",
                      [](const ParameterStore& p) { return contract(linear(p.at("a"), p.at("u"), p.at("v"))); }},
        PrimitiveCase{"concat_slice",
                      [](const ParameterStore& p) {
                        return contract(slice(concat({p.at("u"), p.at("v"), p.at("s")}), 2, 5));
                      }},
        PrimitiveCase{"stack_row_transpose",
                      [](const ParameterStore& p) {
                        return contract(row(transpose(stack({p.at("v"), scale(p.at("v"), 3.0), row(p.at("w"), 2)})), 2));
                      }},
        PrimitiveCase{"index_select",
                      [](const ParameterStore& p) { return contract(index_select(p.at("a"), {2, 0, 2})); }},
        PrimitiveCase{"select_take",
                      [](const ParameterStore& p) {
                        return contract(concat({select(p.at("v"), 1), take(p.at("v"), {3, 3, 0})}));
                      }},
        PrimitiveCase{"sum_mean",
                      [](const ParameterStore& p) {
                        return add(mul(sum(p.at("a")), mean(p.at("b"))),
                                   contract(mean(std::vector{p.at("u"), scale(p.at("u"), 2.0)})));
                      }},
        PrimitiveCase{"weighted_sum",
                      [](const ParameterStore& p) {
                        return contract(weighted_sum(p.at("h"), {p.at("v"), row(p.at("w"), 1)}));
                      }},
        PrimitiveCase{"sigmoid", [](const ParameterStore& p) { return contract(sigmoid(p.at("a"))); }},
        PrimitiveCase{"tanh", [](const ParameterStore& p) { return contract(tanh(p.at("a"))); }},
        PrimitiveCase{"relu", [](const ParameterStore& p) { return contract(relu(p.at("a"))); }},
        PrimitiveCase{"leaky_relu", [](const ParameterStore& p) { return contract(leaky_relu(p.at("a"))); }},
        PrimitiveCase{"softmax_vector", [](const ParameterStore& p) { return contract(softmax(p.at("v"))); }},
        PrimitiveCase{"softmax_rows", [](const ParameterStore& p) { return contract(softmax(p.at("a"))); }},
        PrimitiveCase{"log_softmax_rows",
                      [](const ParameterStore& p) { return contract(log_softmax(p.at("a"))); }},
        PrimitiveCase{"gru_cell",
                      [](const ParameterStore& p) {
                        return contract(gru_cell(slice(p.at("v"), 0, 2), p.at("h"), gru(p)));
                      }}),
    [](const ::testing::TestParamInfo<PrimitiveCase>& info) { return std::string(info.param.name); });

TEST(GradCheck, QuadraticIsExact) {
  Rng rng(2);
  ParameterStore p;
  p.add("x", {5}, Init::unit_uniform, rng);
  const auto r = finite_diff_check([&] { return sum(mul(p.at("x"), p.at("x"))); }, p);
  EXPECT_LT(r.max_rel_error, 1e-8);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.groups.at(0).checked, 5u);
}

TEST(GradCheck, RestoresParameters) {
  Rng rng(2);
  ParameterStore p;
  p.add("x", {5}, Init::unit_uniform, rng);
  const ParameterStore before = p.clone();
  (void)finite_diff_check([&] { return sum(tanh(p.at("x"))); }, p);
  EXPECT_TRUE(p.identical(before));
}

TEST(GradCheck, ReluKinkIsSkipped) {
  ParameterStore p;
  p.add("x", Tensor::vector({0.0, 0.5, -0.5}));
  const auto r = finite_diff_check([&] { return sum(relu(p.at("x"))); }, p);
  EXPECT_EQ(r.skipped_kinks, 1u);
  EXPECT_EQ(r.groups.at(0).checked, 2u);
  EXPECT_TRUE(r.passed);
}

TEST(GradCheck, DetectsWrongGradient) {
  ParameterStore p;
  p.add("x", Tensor::vector({0.3, 0.7}));
  // The detached factor hides half of d(x^2)/dx from reverse mode.
  const auto r = finite_diff_check([&] { return sum(mul(p.at("x"), p.at("x").detach())); }, p);
  EXPECT_FALSE(r.passed);
  EXPECT_NEAR(r.max_rel_error, 0.5, 1e-6);
}

}  // namespace
}  // namespace adalogn
