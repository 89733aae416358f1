/* Copyright 2026 The BaSNet Engine Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>
#include "basnet/grad_check.h"
#include "basnet/graph.h"
#include "basnet/random.h"
#include "basnet/tensor.h"
#include "oracles.h"

namespace basnet {
namespace {

TensorD RandomTensor(Shape shape, Rng& rng, double lo = -1, double hi = 1) {
  TensorD t(std::move(shape));
  for (double& v : t.values()) v = UniformRange(rng, lo, hi);
  return t;
}

// Keeps every entry at least `margin` away from zero, so finite differences
// never straddle a ReLU kink.
TensorD AwayFromZero(TensorD t, double margin) {
  for (double& v : t.values()) {
    if (std::abs(v) < margin) v = v < 0 ? -margin : margin;
  }
  return t;
}

TEST(TensorTest, ShapeAndAccess) {
  TensorD m = TensorD::Matrix(2, 3, {1, 2, 3, 4, 5, 6});
  EXPECT_EQ(m.rank(), 2u);
  EXPECT_EQ(m.rows(), 2u);
  EXPECT_EQ(m.cols(), 3u);
  EXPECT_EQ(m(1, 2), 6);
  EXPECT_EQ(m.row(1)[0], 4);
  EXPECT_EQ(TensorD::Vector({1, 2}).rows(), 1u);
  EXPECT_EQ(ShapeString({2, 3}), "[2x3]");
}

TEST(TensorTest, RejectsBadShapes) {
  EXPECT_THROW(TensorD(Shape{}), Error);
  EXPECT_THROW(TensorD(Shape{1, 1, 1, 1}), Error);
  try {
    TensorD({2, 2}, std::vector<double>{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(TensorTest, CastRoundTrip) {
  const Tensor f = Tensor::Matrix(1, 2, {0.5f, -2.25f});
  EXPECT_EQ(f.Cast<double>().Cast<float>(), f);
}

TEST(ParameterSetTest, AddFindAndArithmetic) {
  ParameterSet<double> p;
  p.Add("a", TensorD::Vector({1, 2}));
  p.Add("b", TensorD::Vector({3}));
  EXPECT_EQ(p.Find("b"), 1u);
  EXPECT_EQ(p.Find("zzz"), p.size());
  EXPECT_THROW(p.Add("a", TensorD::Vector({0})), Error);
  ParameterSet<double> q = p.ZerosLike();
  EXPECT_EQ(q.value(0)[1], 0);
  q.AddScaled(p, 2.0);
  EXPECT_EQ(q.value(0)[1], 4);
  EXPECT_EQ(q.TotalSize(), 3u);
  q.SetZero();
  EXPECT_EQ(q, p.ZerosLike());
}

TEST(Conv1dTest, IdentityKernelIsExact) {
  Rng rng(3);
  const TensorD x = RandomTensor({4, 9}, rng, -1e3, 1e3);
  TensorD kernel({4, 4, 1});
  for (std::size_t d = 0; d < 4; ++d) kernel[d * 4 + d] = 1;
  ParameterSet<double> p;
  p.Add("w", kernel);
  p.Add("b", TensorD({4}));
  Graph<double> g;
  const NodeId y = g.Conv1d(g.Input(x), g.Parameter(p, 0), g.Parameter(p, 1));
  EXPECT_EQ(g.value(y), x);
}

TEST(Conv1dTest, ZeroKernelGivesBias) {
  Rng rng(4);
  ParameterSet<double> p;
  p.Add("w", TensorD({2, 3, 3}));
  p.Add("b", TensorD::Vector({1.5, -2}));
  Graph<double> g;
  const NodeId y = g.Conv1d(g.Input(RandomTensor({3, 5}, rng)),
                            g.Parameter(p, 0), g.Parameter(p, 1));
  for (std::size_t t = 0; t < 5; ++t) {
    EXPECT_EQ(g.value(y)(0, t), 1.5);
    EXPECT_EQ(g.value(y)(1, t), -2);
  }
}

TEST(Conv1dTest, HandConvolutionWithZeroPadding) {
  ParameterSet<double> p;
  p.Add("w", TensorD({1, 1, 3}, std::vector<double>{1, 1, 1}));
  p.Add("b", TensorD({1}));
  Graph<double> g;
  const NodeId y = g.Conv1d(g.Input(TensorD::Matrix(1, 3, {1, 2, 3})),
                            g.Parameter(p, 0), g.Parameter(p, 1));
  EXPECT_EQ(g.value(y), TensorD::Matrix(1, 3, {3, 6, 5}));
}

TEST(Conv1dTest, ShapeMismatchIsRejected) {
  ParameterSet<double> p;
  p.Add("w", TensorD({1, 2, 3}));
  p.Add("b", TensorD({1}));
  p.Add("even", TensorD({1, 3, 2}));
  Graph<double> g;
  const NodeId x = g.Input(TensorD({3, 4}));
  try {
    g.Conv1d(x, g.Parameter(p, 0), g.Parameter(p, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
  EXPECT_THROW(g.Conv1d(x, g.Parameter(p, 2), g.Parameter(p, 1)), Error);
}

TEST(ReluTest, Values) {
  Graph<double> g;
  const NodeId y = g.Relu(g.Input(TensorD::Vector({-1, 0, 2})));
  EXPECT_EQ(g.value(y), TensorD::Vector({0, 0, 2}));
  const NodeId z = g.Relu(g.Input(TensorD::Vector({-3, -0.5})));
  EXPECT_EQ(g.value(z), TensorD::Vector({0, 0}));
}

TEST(ReluTest, GradientAtThreeIsOne) {
  Graph<double> g;
  const NodeId x = g.Input(TensorD::Vector({3.0}), true);
  g.Backward(g.Sum(g.Relu(x)), nullptr);
  EXPECT_EQ(g.grad(x)[0], 1.0);
  const double eps = 1e-4;
  EXPECT_NEAR(((3 + eps) - (3 - eps)) / (2 * eps), g.grad(x)[0], 1e-9);
}

TEST(SigmoidTest, Values) {
  EXPECT_EQ(kernels::Sigmoid(0.0), 0.5);
  const double s = kernels::Sigmoid(40.0);
  EXPECT_LT(s, 1.0);
  EXPECT_GT(s, 1.0 - 1e-15);
  EXPECT_GT(kernels::Sigmoid(-800.0), 0.0);
  EXPECT_LT(kernels::Sigmoid(800.0), 1.0);
}

TEST(SigmoidTest, GradientAtOne) {
  Graph<double> g;
  const NodeId x = g.Input(TensorD::Vector({1.0}), true);
  g.Backward(g.Sum(g.Sigmoid(x)), nullptr);
  EXPECT_NEAR(g.grad(x)[0], 0.19661193324148185, 1e-15);
  const double eps = 1e-5;
  const double fd =
      (1 / (1 + std::exp(-(1 + eps))) - 1 / (1 + std::exp(-(1 - eps)))) /
      (2 * eps);
  EXPECT_NEAR(g.grad(x)[0], fd, 1e-6);
}

TEST(SoftmaxTest, Values) {
  const auto uniform = kernels::Softmax<double>(std::vector<double>{0, 0, 0});
  for (double p : uniform) EXPECT_NEAR(p, 1.0 / 3, 1e-15);
  const auto two = kernels::Softmax<double>(std::vector<double>{std::log(2.0), 0});
  EXPECT_NEAR(two[0], 2.0 / 3, 1e-15);
  EXPECT_NEAR(two[1], 1.0 / 3, 1e-15);
}

TEST(SoftmaxTest, SumsToOneShiftInvariantAndPositive) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = UniformInt(rng, 1, 9);
    std::vector<double> x(n);
    for (double& v : x) v = UniformRange(rng, -50, 50);
    const double shift = UniformRange(rng, -100, 100);
    std::vector<double> shifted = x;
    for (double& v : shifted) v += shift;
    const auto p = kernels::Softmax<double>(x);
    const auto q = kernels::Softmax<double>(shifted);
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_GT(p[i], 0.0);
      EXPECT_NEAR(p[i], q[i], 1e-12);
    }
  }
  const auto extreme = kernels::Softmax<double>(std::vector<double>{0, -1e6});
  EXPECT_GT(extreme[1], 0.0);
}

TEST(TopkMeanTest, Examples) {
  const std::vector<double> s = {0.9, 0.1, 0.5, 0.3};
  EXPECT_NEAR(kernels::TopkMean<double>(s, 2), 0.7, 1e-15);
  EXPECT_NEAR(kernels::TopkMean<double>(s, 4), 0.45, 1e-15);
  EXPECT_EQ(kernels::TopkMean<double>(std::vector<double>(5, 0.25), 3), 0.25);
}

TEST(TopkMeanTest, RejectsBadK) {
  const std::vector<double> s = {1, 2};
  EXPECT_THROW(kernels::TopkMean<double>(s, 0), Error);
  EXPECT_THROW(kernels::TopkMean<double>(s, 3), Error);
}

TEST(TopkMeanTest, TiesPreferLowerIndex) {
  std::vector<std::size_t> picked;
  kernels::TopkMean<double>(std::vector<double>{1, 2, 2, 2, 0}, 2, &picked);
  ASSERT_EQ(picked.size(), 2u);
  EXPECT_EQ(picked[0], 1u);
  EXPECT_EQ(picked[1], 2u);

  Graph<double> g;
  const NodeId x = g.Input(TensorD::Matrix(1, 4, {5, 5, 5, 5}), true);
  g.Backward(g.Sum(g.TopkMeanRows(x, 2, 1)), nullptr);
  EXPECT_EQ(g.grad(x), TensorD::Matrix(1, 4, {0.5, 0.5, 0, 0}));
}

TEST(TopkMeanTest, MatchesSortOracleAndBounds) {
  Rng rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = UniformInt(rng, 1, 30);
    const std::size_t k = UniformInt(rng, 1, static_cast<std::int64_t>(n));
    std::vector<double> s(n);
    for (double& v : s) {
      // Coarse grid so that ties are common.
      v = static_cast<double>(UniformInt(rng, -4, 4)) * 0.5;
    }
    const double got = kernels::TopkMean<double>(s, k);
    EXPECT_EQ(got, oracle::TopkMean(s, k));
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / n;
    EXPECT_GE(got, mean - 1e-12);
    EXPECT_LE(got, *std::max_element(s.begin(), s.end()));
    // Raising a coordinate never lowers the result.
    std::vector<double> raised = s;
    raised[UniformInt(rng, 0, n - 1)] += UniformRange(rng, 0, 3);
    EXPECT_GE(kernels::TopkMean<double>(raised, k), got);
  }
}

TEST(ScaleTemporalTest, Values) {
  Graph<double> g;
  const NodeId x = g.Input(TensorD::Matrix(1, 2, {2, 4}));
  EXPECT_EQ(g.value(g.ScaleTemporal(x, g.Input(TensorD::Vector({0.5, 0.25})))),
            TensorD::Matrix(1, 2, {1, 1}));
  EXPECT_EQ(g.value(g.ScaleTemporal(x, g.Input(TensorD::Vector({1, 1})))),
            TensorD::Matrix(1, 2, {2, 4}));
  EXPECT_EQ(g.value(g.ScaleTemporal(x, g.Input(TensorD::Vector({0, 0})))),
            TensorD::Matrix(1, 2, {0, 0}));
  EXPECT_THROW(g.ScaleTemporal(x, g.Input(TensorD::Vector({1, 1, 1}))), Error);
}

TEST(BackwardTest, SumGivesOnes) {
  Rng rng(2);
  Graph<double> g;
  const NodeId x = g.Input(RandomTensor({3, 4}, rng), true);
  g.Backward(g.Sum(x), nullptr);
  EXPECT_EQ(g.grad(x), TensorD({3, 4}, 1.0));
}

TEST(BackwardTest, RejectsNonScalarLoss) {
  Graph<double> g;
  const NodeId x = g.Input(TensorD::Vector({1, 2}), true);
  EXPECT_THROW(g.Backward(g.Relu(x), nullptr), Error);
}

TEST(BackwardTest, UnusedParameterGetsExactZero) {
  ParameterSet<double> p;
  p.Add("used", TensorD::Vector({1, 2}));
  p.Add("unused", TensorD::Vector({3}));
  ParameterSet<double> grads = p.ZerosLike();
  Graph<double> g;
  const NodeId a = g.Parameter(p, 0);
  g.Parameter(p, 1);
  g.Backward(g.Sum(g.Sigmoid(a)), &grads);
  EXPECT_EQ(grads.value(1)[0], 0.0);
  EXPECT_NE(grads.value(0)[0], 0.0);
}

TEST(BackwardTest, SharedParameterAccumulatesExactly) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    ParameterSet<double> p;
    p.Add("w", RandomTensor({2, 3, 3}, rng));
    p.Add("b", RandomTensor({2}, rng));
    const TensorD x1 = RandomTensor({3, 6}, rng);
    const TensorD x2 = RandomTensor({3, 6}, rng);
    auto branch = [&](Graph<double>& g, NodeId w, NodeId b, const TensorD& x) {
      return g.Mean(g.Sigmoid(g.Conv1d(g.Input(x), w, b)));
    };
    ParameterSet<double> joint = p.ZerosLike();
    {
      Graph<double> g;
      const NodeId w = g.Parameter(p, 0);
      const NodeId b = g.Parameter(p, 1);
      const std::vector<NodeId> terms = {branch(g, w, b, x1), branch(g, w, b, x2)};
      const std::vector<double> ones = {1, 1};
      g.Backward(g.WeightedSum(terms, ones), &joint);
    }
    ParameterSet<double> first = p.ZerosLike();
    ParameterSet<double> second = p.ZerosLike();
    {
      Graph<double> g;
      g.Backward(branch(g, g.Parameter(p, 0), g.Parameter(p, 1), x1), &first);
    }
    {
      Graph<double> g;
      g.Backward(branch(g, g.Parameter(p, 0), g.Parameter(p, 1), x2), &second);
    }
    ParameterSet<double> sum = first;
    sum.AddScaled(second, 1.0);
    EXPECT_EQ(joint, sum);
  }
}

TEST(GradCheckTest, EmptyParameterSetGivesEmptyReport) {
  const auto report = GradCheck(
      [](const ParameterSet<double>&, ParameterSet<double>*) { return 1.0; },
      ParameterSet<double>());
  EXPECT_TRUE(report.entries.empty());
  EXPECT_EQ(report.max_rel_error, 0.0);
}

TEST(GradCheckTest, SigmoidChainAtSmallEps) {
  Rng rng(21);
  ParameterSet<double> p;
  p.Add("x", RandomTensor({2, 5}, rng, -2, 2));
  const LossClosure loss = [](const ParameterSet<double>& params,
                              ParameterSet<double>* grads) {
    Graph<double> g;
    const NodeId l = g.Sum(g.Sigmoid(g.Sigmoid(g.Parameter(params, 0))));
    if (grads != nullptr) g.Backward(l, grads);
    return g.value(l)[0];
  };
  const auto report = GradCheck(loss, p, {.eps = 1e-5, .floor = 1e-6});
  EXPECT_LT(report.max_rel_error, 1e-7) << report.ToString();
}

TEST(GradCheckTest, DetectsWrongGradient) {
  ParameterSet<double> p;
  p.Add("x", TensorD::Vector({0.3, -0.2}));
  const LossClosure loss = [](const ParameterSet<double>& params,
                              ParameterSet<double>* grads) {
    Graph<double> g;
    const NodeId l = g.Sum(g.Sigmoid(g.Parameter(params, 0)));
    if (grads != nullptr) {
      g.Backward(l, grads);
      grads->value(0)[1] *= 1.01;
    }
    return g.value(l)[0];
  };
  const auto report = GradCheck(loss, p);
  EXPECT_FALSE(report.Passed(1e-5));
  EXPECT_EQ(report.entries[0].worst_index, 1u);
}

// One finite-difference property per op: >= 100 random trials each, with all
// inputs exposed as parameters so the checker covers every input gradient.
class OpGradientTest : public ::testing::TestWithParam<int> {};

double CheckOp(int op, Rng& rng) {
  ParameterSet<double> p;
  const std::size_t d = UniformInt(rng, 1, 4);
  const std::size_t t = UniformInt(rng, 1, 7);
  // Fixed random readout sum_{d,t} y[d,t] * probe[t] turns any D x T output
  // into a scalar with a generic upstream gradient.
  const TensorD probe = RandomTensor({t}, rng);
  LossClosure loss;
  auto readout = [probe](Graph<double>& g, NodeId y) {
    return g.Sum(g.ScaleTemporal(y, g.Input(probe)));
  };
  switch (op) {
    case 0: {  // conv1d
      const std::size_t out = UniformInt(rng, 1, 3);
      const std::size_t k = 2 * UniformInt(rng, 0, 2) + 1;
      p.Add("x", RandomTensor({d, t}, rng));
      p.Add("w", RandomTensor({out, d, k}, rng));
      p.Add("b", RandomTensor({out}, rng));
      loss = [readout](const ParameterSet<double>& q, ParameterSet<double>* gr) {
        Graph<double> g;
        const NodeId y = g.Conv1d(g.Parameter(q, 0), g.Parameter(q, 1),
                                  g.Parameter(q, 2));
        const NodeId l = readout(g, y);
        if (gr) g.Backward(l, gr);
        return g.value(l)[0];
      };
      break;
    }
    case 1:    // relu
    case 2: {  // sigmoid
      p.Add("x", AwayFromZero(RandomTensor({d, t}, rng, -3, 3), 1e-2));
      loss = [op, readout](const ParameterSet<double>& q, ParameterSet<double>* gr) {
        Graph<double> g;
        const NodeId x = g.Parameter(q, 0);
        const NodeId l = readout(g, op == 1 ? g.Relu(x) : g.Sigmoid(x));
        if (gr) g.Backward(l, gr);
        return g.value(l)[0];
      };
      break;
    }
    case 3: {  // scale_temporal
      p.Add("x", RandomTensor({d, t}, rng));
      p.Add("w", RandomTensor({t}, rng));
      loss = [readout](const ParameterSet<double>& q, ParameterSet<double>* gr) {
        Graph<double> g;
        const NodeId l = readout(
            g, g.ScaleTemporal(g.Parameter(q, 0), g.Parameter(q, 1)));
        if (gr) g.Backward(l, gr);
        return g.value(l)[0];
      };
      break;
    }
    case 4: {  // topk mean rows -> softmax -> cross entropy
      TensorD x({d + 1, t});
      // Distinct values on a 0.01 grid keep the selection stable under eps.
      std::vector<double> grid(x.size());
      for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.01 * i;
      std::shuffle(grid.begin(), grid.end(), rng);
      for (std::size_t i = 0; i < grid.size(); ++i) x[i] = grid[i] - 0.5;
      p.Add("x", x);
      const std::size_t k = UniformInt(rng, 1, t);
      const std::size_t rows = UniformInt(rng, 1, d + 1);
      TensorD target({rows});
      for (double& v : target.values()) v = UniformRange(rng, 0, 1);
      loss = [k, rows, target](const ParameterSet<double>& q,
                               ParameterSet<double>* gr) {
        Graph<double> g;
        const NodeId a = g.TopkMeanRows(g.Parameter(q, 0), k, rows);
        const NodeId l = g.CrossEntropy(g.Softmax(a), target);
        if (gr) g.Backward(l, gr);
        return g.value(l)[0];
      };
      break;
    }
    default: {  // mean, slice, weighted sum
      const std::size_t n = UniformInt(rng, 2, 8);
      p.Add("v", RandomTensor({n}, rng));
      p.Add("m", RandomTensor({d, t}, rng));
      const std::size_t begin = UniformInt(rng, 0, n - 2);
      const std::size_t end = UniformInt(rng, begin + 1, n);
      const std::vector<double> coeffs = {UniformRange(rng, -2, 2),
                                          UniformRange(rng, -2, 2)};
      loss = [begin, end, coeffs](const ParameterSet<double>& q,
                                  ParameterSet<double>* gr) {
        Graph<double> g;
        const NodeId s = g.Sum(g.Sigmoid(g.Slice(g.Parameter(q, 0), begin, end)));
        const NodeId m = g.Mean(g.Sigmoid(g.Parameter(q, 1)));
        const std::vector<NodeId> terms = {s, m};
        const NodeId l = g.WeightedSum(terms, coeffs);
        if (gr) g.Backward(l, gr);
        return g.value(l)[0];
      };
      break;
    }
  }
  return GradCheck(loss, p).max_rel_error;
}

TEST_P(OpGradientTest, MatchesFiniteDifferences) {
  Rng rng(1000 + GetParam());
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    worst = std::max(worst, CheckOp(GetParam(), rng));
  }
  EXPECT_LT(worst, 1e-5);
}

INSTANTIATE_TEST_SUITE_P(AllOps, OpGradientTest, ::testing::Range(0, 6));

}  // namespace
}  // namespace basnet
