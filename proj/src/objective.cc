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
#include "basnet/objective.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace basnet {

std::string_view TrainModeName(TrainMode mode) {
  switch (mode) {
    case TrainMode::kBaseline: return "baseline";
    case TrainMode::kBaseOnly: return "base_only";
    case TrainMode::kSuppOnly: return "supp_only";
    case TrainMode::kFull: return "full";
  }
  return "unknown";
}

TrainMode ParseTrainMode(std::string_view name) {
  for (TrainMode m : {TrainMode::kBaseline, TrainMode::kBaseOnly,
                      TrainMode::kSuppOnly, TrainMode::kFull}) {
    if (TrainModeName(m) == name) return m;
  }
  Fail(ErrorKind::kInvalidArgument,
       "unknown mode '" + std::string(name) +
           "' (expected baseline, base_only, supp_only or full)");
}

VideoLabel VideoLabel::FromClasses(int num_classes,
                                   std::span<const int> classes) {
  VideoLabel label{std::vector<int>(num_classes, 0)};
  for (int c : classes) {
    Require(c >= 0 && c < num_classes, ErrorKind::kInvalidArgument,
            "class id " + std::to_string(c) + " outside [0, " +
                std::to_string(num_classes) + ")");
    label.multi_hot[c] = 1;
  }
  return label;
}

void VideoLabel::Validate() const {
  int positives = 0;
  for (int v : multi_hot) {
    Require(v == 0 || v == 1, ErrorKind::kInvalidArgument,
            "label entries must be 0 or 1");
    positives += v;
  }
  Require(positives >= 1, ErrorKind::kInvalidArgument,
          "a video label needs at least one positive class");
}

std::size_t TopkSize(std::size_t num_segments, double r) {
  Require(r > 0, ErrorKind::kInvalidArgument, "r must be positive");
  const auto k = static_cast<std::size_t>(
      std::floor(static_cast<double>(num_segments) / r));
  Require(k >= 1, ErrorKind::kInvalidArgument,
          "floor(T / r) is zero for T=" + std::to_string(num_segments) +
              ", r=" + std::to_string(r));
  return k;
}

template <typename Scalar>
std::vector<Scalar> Aggregate(const BasicTensor<Scalar>& cas, double r) {
  Require(cas.rank() == 2, ErrorKind::kShape,
          "aggregate expects a 2D activation sequence");
  const std::size_t k = TopkSize(cas.cols(), r);
  std::vector<Scalar> scores(cas.rows());
  for (std::size_t c = 0; c < cas.rows(); ++c) {
    scores[c] = kernels::TopkMean<Scalar>(cas.row(c), k);
  }
  return scores;
}

template std::vector<float> Aggregate(const Tensor&, double);
template std::vector<double> Aggregate(const TensorD&, double);

namespace {

std::vector<double> ExtendLabel(const VideoLabel& y, double background,
                                bool normalize) {
  std::vector<double> out(y.multi_hot.begin(), y.multi_hot.end());
  out.push_back(background);
  if (normalize) {
    double total = 0;
    for (double v : out) total += v;
    if (total > 0) {
      for (double& v : out) v /= total;
    }
  }
  return out;
}

template <typename Scalar>
BasicTensor<Scalar> ToTensor(const std::vector<double>& v) {
  return BasicTensor<Scalar>::Vector(std::vector<Scalar>(v.begin(), v.end()));
}

}  // namespace

std::vector<double> MakeLabelBase(const VideoLabel& y, bool normalize) {
  return ExtendLabel(y, 1.0, normalize);
}

std::vector<double> MakeLabelSupp(const VideoLabel& y, bool normalize) {
  return ExtendLabel(y, 0.0, normalize);
}

double LossCe(std::span<const double> probs, std::span<const double> target) {
  Require(probs.size() == target.size(), ErrorKind::kShape,
          "cross entropy needs matching probability and label lengths");
  double loss = 0;
  for (std::size_t c = 0; c < probs.size(); ++c) {
    if (target[c] == 0) continue;
    loss -= target[c] * std::log(std::max(probs[c], 1e-12));
  }
  return loss;
}

double LossNorm(std::span<const double> weights) {
  Require(!weights.empty(), ErrorKind::kShape, "empty foreground weights");
  double total = 0;
  for (double w : weights) total += std::abs(w);
  return total / static_cast<double>(weights.size());
}

LossBreakdown LossOverall(double l_base, double l_supp, double l_norm,
                          double alpha, double beta, double gamma) {
  Require(alpha >= 0 && beta >= 0 && gamma >= 0, ErrorKind::kInvalidArgument,
          "loss weights must be non-negative");
  return {l_base, l_supp, l_norm, alpha * l_base + beta * l_supp + gamma * l_norm};
}

template <typename Scalar>
VideoLossNodes BuildVideoLoss(Graph<Scalar>& graph, const BasNet<Scalar>& model,
                              NodeId x, const VideoLabel& label,
                              const ObjectiveConfig& config,
                              std::optional<double> pinned_weight) {
  const std::size_t num_classes = model.config().num_classes;
  Require(label.num_classes() == num_classes, ErrorKind::kMismatch,
          "label has " + std::to_string(label.num_classes()) +
              " classes, model has " + std::to_string(num_classes));
  const TrainMode mode = config.mode;
  const bool use_base = mode != TrainMode::kSuppOnly;
  const bool use_supp =
      mode == TrainMode::kSuppOnly || mode == TrainMode::kFull;

  VideoLossNodes out;
  out.branches = model.Build(
      graph, x,
      {.base = use_base, .suppression = use_supp, .pinned_weight = pinned_weight});
  const std::size_t k = TopkSize(graph.value(x).cols(), config.r);

  std::vector<NodeId> terms;
  std::vector<Scalar> coeffs;
  if (use_base) {
    std::vector<double> target;
    std::size_t rows = num_classes + 1;
    if (mode == TrainMode::kBaseline) {
      // No background class: aggregate and normalize over C rows only.
      rows = num_classes;
      target.assign(label.multi_hot.begin(), label.multi_hot.end());
      if (config.normalize_labels) {
        double total = 0;
        for (double v : target) total += v;
        for (double& v : target) v /= total;
      }
    } else {
      target = MakeLabelBase(label, config.normalize_labels);
    }
    const NodeId scores = graph.TopkMeanRows(*out.branches.cas_base, k, rows);
    out.l_base = graph.CrossEntropy(graph.Softmax(scores),
                                    ToTensor<Scalar>(target));
    terms.push_back(*out.l_base);
    coeffs.push_back(static_cast<Scalar>(config.alpha));
  }
  if (use_supp) {
    const NodeId scores =
        graph.TopkMeanRows(*out.branches.cas_supp, k, num_classes + 1);
    out.l_supp = graph.CrossEntropy(
        graph.Softmax(scores),
        ToTensor<Scalar>(MakeLabelSupp(label, config.normalize_labels)));
    out.l_norm = graph.Mean(*out.branches.weights);
    terms.push_back(*out.l_supp);
    coeffs.push_back(static_cast<Scalar>(config.beta));
    terms.push_back(*out.l_norm);
    coeffs.push_back(static_cast<Scalar>(config.gamma));
  }
  out.l_overall = graph.WeightedSum(terms, coeffs);
  return out;
}

template <typename Scalar>
LossBreakdown BatchObjective(const BasNet<Scalar>& model,
                             std::span<const LabeledMap<Scalar>> batch,
                             const ObjectiveConfig& config,
                             ParameterSet<Scalar>* gradients,
                             const BatchOptions& options) {
  Require(!batch.empty(), ErrorKind::kInvalidArgument, "empty batch");
  struct PerVideo {
    LossBreakdown loss;
    ParameterSet<Scalar> grads;
  };
  std::vector<PerVideo> results(batch.size());

  auto run_one = [&](std::size_t i) {
    Graph<Scalar> graph;
    const NodeId x = graph.Input(*batch[i].features);
    const VideoLossNodes nodes = BuildVideoLoss(
        graph, model, x, *batch[i].label, config, options.pinned_weight);
    auto scalar = [&](const std::optional<NodeId>& id) {
      return id ? static_cast<double>(graph.value(*id)[0]) : 0.0;
    };
    results[i].loss = {scalar(nodes.l_base), scalar(nodes.l_supp),
                       scalar(nodes.l_norm), 0.0};
    if (gradients != nullptr) {
      results[i].grads = model.params().ZerosLike();
      graph.Backward(nodes.l_overall, &results[i].grads);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(options.threads, 1)), 1, batch.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < batch.size(); ++i) run_one(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < batch.size(); i += workers) run_one(i);
      });
    }
  }

  const double inv_n = 1.0 / static_cast<double>(batch.size());
  double base = 0, supp = 0, norm = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    base += results[i].loss.l_base;
    supp += results[i].loss.l_supp;
    norm += results[i].loss.l_norm;
    if (gradients != nullptr) {
      gradients->AddScaled(results[i].grads, static_cast<Scalar>(inv_n));
    }
  }
  return LossOverall(base * inv_n, supp * inv_n, norm * inv_n, config.alpha,
                     config.beta, config.gamma);
}

#define BASNET_INSTANTIATE_OBJECTIVE(S)                                       \
  template VideoLossNodes BuildVideoLoss(Graph<S>&, const BasNet<S>&, NodeId, \
                                         const VideoLabel&,                   \
                                         const ObjectiveConfig&,              \
                                         std::optional<double>);              \
  template LossBreakdown BatchObjective(const BasNet<S>&,                     \
                                        std::span<const LabeledMap<S>>,       \
                                        const ObjectiveConfig&,               \
                                        ParameterSet<S>*, const BatchOptions&);

BASNET_INSTANTIATE_OBJECTIVE(float)
BASNET_INSTANTIATE_OBJECTIVE(double)

#undef BASNET_INSTANTIATE_OBJECTIVE

}  // namespace basnet
