#include <cmath>
#include <functional>
#include <vector>

#include <gtest/gtest.h>

#include "vidchat/numerics/grad_check.hpp"
#include "vidchat/numerics/ops.hpp"
#include "vidchat/numerics/optim.hpp"
#include "vidchat/numerics/parameters.hpp"

namespace vidchat {
namespace {

Tensor random_tensor(Rng& rng, Shape shape, double lo = -1.0, double hi = 1.0) {
  std::vector<double> v(shape_size(shape));
  for (auto& x : v) x = uniform_real(rng, lo, hi);
  return Tensor(std::move(shape), std::move(v));
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  Tensor a = Tensor::matrix(3, 3, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  Tensor c = matmul(Tensor::identity(3), a);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(c[i], a[i]);
}

TEST(Matmul, HandComputedProduct) {
  Tensor c = matmul(Tensor::matrix(2, 2, {1, 2, 3, 4}), Tensor::matrix(2, 1, {0, 1}));
  ASSERT_EQ(c.shape(), (Shape{2, 1}));
  EXPECT_EQ(c[0], 2.0);
  EXPECT_EQ(c[1], 4.0);
}

TEST(Matmul, ZeroLeftOperandGivesZeros) {
  Rng rng(1);
  Tensor c = matmul(Tensor::zeros({2, 3}), random_tensor(rng, {3, 4}));
  ASSERT_EQ(c.shape(), (Shape{2, 4}));
  for (double v : c.data()) EXPECT_EQ(v, 0.0);
}

TEST(Matmul, ShapeMismatchNamesBothShapes) {
  try {
    matmul(Tensor::zeros({2, 3}), Tensor::zeros({4, 2}));
    FAIL() << "expected DimensionError";
  } catch (const DimensionError& e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("[2x3]"), std::string::npos);
    EXPECT_NE(msg.find("[4x2]"), std::string::npos);
  }
}

TEST(LogSoftmax, MatrixRowsMatchVectorCase) {
  Tensor m = Tensor::matrix(2, 3, {1, 2, 3, -4, 0, 9});
  Tensor y = log_softmax(m);
  for (std::size_t r = 0; r < 2; ++r) {
    Tensor v = log_softmax(row(m, r));
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(y.at(r, c), v[c]);
  }
}

TEST(Softmax, ConstantInputIsUniform) {
  Tensor y = softmax(Tensor::vector({3.5, 3.5, 3.5, 3.5}));
  for (double v : y.data()) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(Softmax, LogThreeGivesQuarterThreeQuarters) {
  Tensor y = softmax(Tensor::vector({0.0, std::log(3.0)}));
  EXPECT_NEAR(y[0], 0.25, 1e-15);
  EXPECT_NEAR(y[1], 0.75, 1e-15);
}

TEST(Softmax, LargeLogitsDoNotOverflow) {
  Tensor y = softmax(Tensor::vector({1000.0, 0.0}));
  EXPECT_TRUE(std::isfinite(y[0]));
  EXPECT_NEAR(y[0], 1.0, 1e-12);
  EXPECT_NEAR(y[1], 0.0, 1e-12);
}

TEST(Softmax, NanInputIsNumericError) {
  EXPECT_THROW(softmax(Tensor::vector({1.0, std::nan("")})), NumericError);
}

TEST(Softmax, SumsToOneAlongEitherAxis) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t r = 1 + uniform_index(rng, 6), c = 1 + uniform_index(rng, 6);
    Tensor x = random_tensor(rng, {r, c}, -50.0, 50.0);
    Tensor by_row = softmax(x, 1);
    for (std::size_t i = 0; i < r; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < c; ++j) s += by_row.at(i, j);
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
    Tensor by_col = softmax(x, 0);
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < r; ++i) s += by_col.at(i, j);
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(Pointwise, BasicValues) {
  EXPECT_EQ(sigmoid(Tensor::scalar(0.0)).item(), 0.5);
  EXPECT_EQ(tanh(Tensor::scalar(0.0)).item(), 0.0);
  Tensor c = concat({Tensor::vector({1, 2}), Tensor::vector({3})});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], 1.0);
  EXPECT_EQ(c[2], 3.0);
}

TEST(Pointwise, LogOfNonPositiveIsNumericError) {
  EXPECT_THROW(log(Tensor::vector({1.0, 0.0})), NumericError);
  EXPECT_THROW(log(Tensor::vector({-2.0})), NumericError);
}

TEST(Backward, SumGivesOnes) {
  Tensor x = Tensor::vector({1, 2, 3}, true);
  sum(x).backward();
  ASSERT_TRUE(x.has_grad());
  for (double g : x.grad()) EXPECT_EQ(g, 1.0);
}

TEST(Backward, SquareGivesTwiceX) {
  Tensor x = Tensor::vector({1, 2}, true);
  sum(mul(x, x)).backward();
  EXPECT_EQ(x.grad()[0], 2.0);
  EXPECT_EQ(x.grad()[1], 4.0);
}

TEST(Backward, DetachedInputGetsNoGrad) {
  Tensor w = Tensor::vector({1, 2}, true);
  Tensor x = Tensor::vector({3, 4}, false);
  sum(mul(w, x)).backward();
  EXPECT_TRUE(w.has_grad());
  EXPECT_FALSE(x.has_grad());
}

TEST(Backward, NonScalarLossIsContractError) {
  Tensor x = Tensor::vector({1, 2}, true);
  EXPECT_THROW(tanh(x).backward(), ContractError);
}

TEST(Backward, TwoConsumersSumTheirPaths) {
  // f = sum(x*x) + sum(3x) + sum(tanh(x)); df/dx = 2x + 3 + (1 - tanh(x)^2)
  Tensor x = Tensor::vector({0.5, -1.5}, true);
  Tensor f = add_n({sum(mul(x, x)), sum(scale(x, 3.0)), sum(tanh(x))});
  f.backward();
  for (std::size_t i = 0; i < 2; ++i) {
    const double xi = x[i];
    const double t = std::tanh(xi);
    EXPECT_NEAR(x.grad()[i], 2 * xi + 3 + (1 - t * t), 1e-14);
  }
}

TEST(Backward, RepeatedBackwardAccumulatesOnLeavesOnly) {
  Tensor x = Tensor::vector({1, 2}, true);
  Tensor f = sum(mul(x, x));
  f.backward();
  f.backward();
  EXPECT_EQ(x.grad()[0], 4.0);
  EXPECT_EQ(x.grad()[1], 8.0);
  x.zero_grad();
  EXPECT_FALSE(x.has_grad());
}

TEST(GradCheck, TanhOfLinearMap) {
  Rng rng(11);
  Tensor w = random_tensor(rng, {5, 4});
  Tensor x = random_tensor(rng, {4});
  auto f_of_w = [&](const Tensor& wv) { return sum(tanh(matmul(wv, x))); };
  auto f_of_x = [&](const Tensor& xv) { return sum(tanh(matmul(w, xv))); };
  EXPECT_LE(grad_check(f_of_w, w), 1e-4);
  EXPECT_LE(grad_check(f_of_x, x), 1e-4);
}

TEST(GradCheck, LinearFunctionIsExact) {
  Tensor c = Tensor::vector({0.5, -2.0, 3.0});
  auto f = [&](const Tensor& x) { return sum(mul(c, x)); };
  EXPECT_LE(grad_check(f, Tensor::vector({1.0, 2.0, -1.0})), 1e-9);
}

// Every differentiable op at 10 random points with dims <= 8.
TEST(GradCheck, EveryOpAtRandomPoints) {
  Rng rng(2024);
  using Fn = std::function<Tensor(const Tensor&)>;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t r = 1 + uniform_index(rng, 8), c = 1 + uniform_index(rng, 8);
    const std::size_t k = 1 + uniform_index(rng, 8);
    Tensor m = random_tensor(rng, {r, c});
    Tensor other = random_tensor(rng, {r, c});
    Tensor rhs = random_tensor(rng, {c, k});
    Tensor lhs = random_tensor(rng, {k, r});
    Tensor rowv = random_tensor(rng, {c});
    Tensor colv = random_tensor(rng, {r});
    Tensor weights = random_tensor(rng, {r, c});
    // Weighted sum keeps the loss from being invariant (e.g. softmax sums).
    auto wsum = [&](const Tensor& t) { return sum(mul(t, reshape(weights, t.shape()))); };
    std::vector<std::pair<const char*, Fn>> cases = {
        {"matmul_left", [&](const Tensor& x) { return sum(tanh(matmul(x, rhs))); }},
        {"matmul_right", [&](const Tensor& x) { return sum(tanh(matmul(lhs, x))); }},
        {"add", [&](const Tensor& x) { return wsum(add(x, other)); }},
        {"sub", [&](const Tensor& x) { return wsum(sub(other, x)); }},
        {"mul", [&](const Tensor& x) { return wsum(mul(x, x)); }},
        {"tanh", [&](const Tensor& x) { return wsum(tanh(x)); }},
        {"sigmoid", [&](const Tensor& x) { return wsum(sigmoid(x)); }},
        {"exp", [&](const Tensor& x) { return wsum(exp(x)); }},
        {"log_sigmoid", [&](const Tensor& x) { return wsum(log_sigmoid(x)); }},
        {"softmax_rows", [&](const Tensor& x) { return wsum(softmax(x, 1)); }},
        {"softmax_cols", [&](const Tensor& x) { return wsum(softmax(x, 0)); }},
        {"transpose", [&](const Tensor& x) { return sum(tanh(matmul(transpose(x), transpose(lhs)))); }},
        {"add_rows", [&](const Tensor& x) { return wsum(tanh(add_rows(x, rowv))); }},
        {"add_cols", [&](const Tensor& x) { return wsum(tanh(add_cols(x, colv))); }},
        {"mul_rows", [&](const Tensor& x) { return wsum(mul_rows(x, rowv)); }},
        {"concat_cols", [&](const Tensor& x) { return sum(tanh(concat({x, other, x}, 1))); }},
        {"concat_rows", [&](const Tensor& x) { return sum(tanh(concat({x, other}, 0))); }},
        {"row_slice", [&](const Tensor& x) { return sum(tanh(row(x, r - 1))); }},
        {"slice_rows", [&](const Tensor& x) { return sum(tanh(slice_rows(x, r / 2, r))); }},
        {"gather_rows", [&](const Tensor& x) { return sum(tanh(gather_rows(x, {0, r - 1, 0}))); }},
        {"log_softmax_rows", [&](const Tensor& x) { return wsum(log_softmax(x)); }},
        {"pick_rows", [&](const Tensor& x) {
           std::vector<std::size_t> idx(r);
           for (std::size_t i = 0; i < r; ++i) idx[i] = (i * 7) % c;
           return sum(tanh(pick_rows(x, idx)));
         }},
    };
    for (auto& [name, f] : cases) {
      EXPECT_LE(grad_check(f, m), 1e-4) << name << " trial " << trial;
    }
    // Vector ops.
    Tensor v = random_tensor(rng, {c});
    Tensor vw = random_tensor(rng, {c});
    std::vector<std::pair<const char*, Fn>> vcases = {
        {"softmax_vec", [&](const Tensor& x) { return sum(mul(softmax(x), vw)); }},
        {"log_softmax", [&](const Tensor& x) { return sum(mul(log_softmax(x), vw)); }},
        {"log", [&](const Tensor& x) { return sum(mul(log(add_scalar(mul(x, x), 1.0)), vw)); }},
        {"pick", [&](const Tensor& x) { return mul(pick(x, 0), pick(x, c - 1)); }},
        {"dot", [&](const Tensor& x) { return dot(tanh(x), vw); }},
        {"slice", [&](const Tensor& x) { return sum(tanh(slice(x, 0, c))); }},
        {"stack", [&](const Tensor& x) { return sum(tanh(stack({x, vw, x}))); }},
        {"relu", [&](const Tensor& x) { return sum(mul(relu(x), vw)); }},
    };
    for (auto& [name, f] : vcases) {
      EXPECT_LE(grad_check(f, v), 1e-4) << name << " trial " << trial;
    }
  }
}

TEST(Parameters, SortedNamesAndSeededInit) {
  ParameterStore a(42), b(42), c(43);
  for (auto* s : {&a, &b, &c}) {
    s->create("z", {2, 2});
    s->create("a", {3});
  }
  ASSERT_EQ(a.all().begin()->first, "a");
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(a.get("z")[i], b.get("z")[i]);
  EXPECT_NE(a.get("z")[0], c.get("z")[0]);
  for (double v : a.get("z").data()) {
    EXPECT_GE(v, -0.08);
    EXPECT_LT(v, 0.08);
  }
  EXPECT_THROW(a.create("a", {1}), ConfigError);
}

TEST(Optim, ClipScalesNormFourByHalf) {
  ParameterStore s(0);
  Tensor& p = s.create("p", {2});
  p.mutable_grad()[0] = 0.0;
  p.mutable_grad()[1] = 4.0;
  EXPECT_DOUBLE_EQ(clip_grad_norm(s, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(p.grad()[1], 2.0);
}

TEST(Optim, ClipLeavesSmallGradients) {
  ParameterStore s(0);
  Tensor& p = s.create("p", {2});
  p.mutable_grad()[0] = 1.0;
  clip_grad_norm(s, 2.0);
  EXPECT_DOUBLE_EQ(p.grad()[0], 1.0);
}

TEST(Optim, AdamMinimizesQuadratic) {
  ParameterStore s(3);
  Tensor& p = s.create("p", {3});
  Adam adam({.lr = 0.05});
  Tensor target = Tensor::vector({1.0, -2.0, 0.5});
  for (int i = 0; i < 2000; ++i) {
    Tensor d = sub(p, target);
    sum(mul(d, d)).backward();
    adam.step(s);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(p[i], target[i], 1e-3);
  EXPECT_FALSE(p.has_grad());
}

TEST(Determinism, SameSeedSameBits) {
  auto run = [](std::uint64_t seed) {
    ParameterStore s(seed);
    Tensor& w = s.create("w", {4, 4});
    Tensor& x = s.create("x", {4});
    Tensor f = sum(tanh(matmul(w, x)));
    f.backward();
    std::vector<double> out{f.item()};
    out.insert(out.end(), w.grad().begin(), w.grad().end());
    return out;
  };
  EXPECT_EQ(run(5), run(5));
}

}  // namespace
}  // namespace vidchat
