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
#ifndef BASNET_OBJECTIVE_H_
#define BASNET_OBJECTIVE_H_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "basnet/model.h"

namespace basnet {

// Ablation rows: vanilla MIL without the background class, the base branch
// with it, the suppression branch alone, and both branches jointly.
enum class TrainMode { kBaseline, kBaseOnly, kSuppOnly, kFull };

std::string_view TrainModeName(TrainMode mode);
TrainMode ParseTrainMode(std::string_view name);

// Multi-hot video-level label over the C action classes.
struct VideoLabel {
  std::vector<int> multi_hot;

  static VideoLabel FromClasses(int num_classes, std::span<const int> classes);
  std::size_t num_classes() const { return multi_hot.size(); }
  bool Has(std::size_t c) const { return multi_hot.at(c) != 0; }
  // Requires binary entries with at least one positive class.
  void Validate() const;

  friend bool operator==(const VideoLabel&, const VideoLabel&) = default;
};

struct LossBreakdown {
  double l_base = 0;
  double l_supp = 0;
  double l_norm = 0;
  double l_overall = 0;
};

struct ObjectiveConfig {
  TrainMode mode = TrainMode::kFull;
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1e-4;
  double r = 8.0;
  bool normalize_labels = false;
};

// k = floor(T / r); rejects k == 0.
std::size_t TopkSize(std::size_t num_segments, double r);

// Per-row top-k mean of a (C+1) x T activation sequence, k = floor(T / r).
template <typename Scalar>
std::vector<Scalar> Aggregate(const BasicTensor<Scalar>& cas, double r);

template <typename Scalar>
std::vector<Scalar> ClassProbs(std::span<const Scalar> scores) {
  return kernels::Softmax(scores);
}

// [y_1 .. y_C, 1] and [y_1 .. y_C, 0], optionally scaled to sum to one.
std::vector<double> MakeLabelBase(const VideoLabel& y, bool normalize);
std::vector<double> MakeLabelSupp(const VideoLabel& y, bool normalize);

// sum_c -y_c log(max(p_c, 1e-12)) for one video.
double LossCe(std::span<const double> probs, std::span<const double> target);
// Mean of |W_t| over time for one video.
double LossNorm(std::span<const double> weights);
LossBreakdown LossOverall(double l_base, double l_supp, double l_norm,
                          double alpha, double beta, double gamma);

struct VideoLossNodes {
  JointNodes branches;
  std::optional<NodeId> l_base;
  std::optional<NodeId> l_supp;
  std::optional<NodeId> l_norm;
  NodeId l_overall;
};

// Builds the mode-gated per-video objective on `graph`. `x` is D x T.
template <typename Scalar>
VideoLossNodes BuildVideoLoss(Graph<Scalar>& graph, const BasNet<Scalar>& model,
                              NodeId x, const VideoLabel& label,
                              const ObjectiveConfig& config,
                              std::optional<double> pinned_weight = {});

template <typename Scalar>
struct LabeledMap {
  const BasicTensor<Scalar>* features;  // D x T
  const VideoLabel* label;
};

struct BatchOptions {
  std::optional<double> pinned_weight;
  int threads = 1;
};

// Batch-mean objective. When `gradients` is non-null the gradient of the
// batch-mean l_overall is added into it. Each video is differentiated on
// its own graph and the per-video gradients are summed in batch order, so
// the result does not depend on `options.threads`.
template <typename Scalar>
LossBreakdown BatchObjective(const BasNet<Scalar>& model,
                             std::span<const LabeledMap<Scalar>> batch,
                             const ObjectiveConfig& config,
                             ParameterSet<Scalar>* gradients,
                             const BatchOptions& options = {});

}  // namespace basnet

#endif  // BASNET_OBJECTIVE_H_
