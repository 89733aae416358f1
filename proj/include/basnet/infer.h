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
#ifndef BASNET_INFER_H_
#define BASNET_INFER_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "basnet/checkpoint.h"
#include "basnet/data.h"
#include "basnet/model.h"

namespace basnet {

struct Proposal {
  int class_id = 0;
  double start_sec = 0;
  double end_sec = 0;
  double score = 0;
  double source_threshold = 0;
};

// Inclusive range of sampled segment indices.
struct IndexInterval {
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const IndexInterval&, const IndexInterval&) = default;
};

std::vector<double> DefaultActThresholds();  // 0, 0.025, ..., 0.5

struct InferConfig {
  double theta_class = 0.25;
  std::vector<double> theta_act = DefaultActThresholds();
  double nms_iou = 0.7;
  // Multiply each proposal score by the video-level class probability.
  bool multiply_class_prob = false;
  // Pool proposals from every threshold and run one NMS (default), or run
  // NMS per threshold before pooling.
  bool pool_before_nms = true;

  void Validate() const;
};

// Maps sampled index t (of T drawn from L raw segments) to seconds.
struct TimeMap {
  std::size_t num_raw = 1;
  std::size_t num_sampled = 1;
  double fps = 25.0;

  double Start(std::size_t t) const;
  double End(std::size_t t) const;  // Start(t + 1)
  double Duration() const;
};

// (t * L / T) * 16 / fps
double IndexToSeconds(std::size_t t, std::size_t num_raw,
                      std::size_t num_sampled, double fps);

// Action classes c < num_classes with probs[c] >= theta. The background
// entry (index num_classes, when present) is never selected.
std::vector<int> SelectClasses(std::span<const double> probs, int num_classes,
                               double theta);

// Per-row temporal min-max to [0, 1]; constant rows become zeros.
TensorD NormalizeCas(const TensorD& cas);

// Maximal runs with score >= theta, in order of their start.
std::vector<IndexInterval> ExtractSegments(std::span<const double> row,
                                           double theta);

// Inner mean minus the mean over both flanks of length
// max(1, floor(len / 4)), clipped to the sequence. No flank -> outer mean 0.
double ContrastScore(std::span<const double> row, IndexInterval interval);

double TemporalIou(double a_start, double a_end, double b_start, double b_end);

// Greedy same-class NMS: keep the best score (ties: earlier start, then
// earlier end), drop
// everything with tIoU >= iou_threshold against it, repeat.
std::vector<Proposal> Nms(std::vector<Proposal> proposals, double iou_threshold);

// Thresholds the activation sequence of every selected class and scores,
// converts and suppresses the resulting proposals. `cas` is (C+1) x T or
// C x T; `probs` holds the video-level probabilities used for selection.
std::vector<Proposal> Localize(const TensorD& cas, std::span<const double> probs,
                               int num_classes, const InferConfig& config,
                               const TimeMap& time_map);

// Background prediction per segment: argmax of the softmaxed column is the
// background row. Needs C+1 rows.
std::vector<bool> BackgroundMask(const TensorD& cas, int num_classes);

// Alternative rule for models with a filtering module: segment t is
// background when W_t < threshold.
std::vector<bool> BackgroundMaskFromWeights(std::span<const double> weights,
                                            double threshold = 0.5);

enum class Branch { kBase, kSuppression };

// Branch whose output a checkpoint of `mode` is evaluated with: models that
// trained the suppression branch use A', the others use A.
Branch InferenceBranch(TrainMode mode);

struct VideoOutputs {
  TensorD cas_base;
  TensorD cas_supp;
  std::vector<double> weights;
  std::vector<double> probs_base;  // over C rows for baseline, else C+1
  std::vector<double> probs_supp;
  TimeMap time_map;
};

// Test-time forward pass on the uniformly sampled feature map.
VideoOutputs RunVideo(const Checkpoint& checkpoint, const VideoRecord& video);

std::vector<Proposal> InferVideo(const Checkpoint& checkpoint,
                                 const VideoOutputs& outputs,
                                 const InferConfig& config);

struct VideoProposals {
  std::string video_id;
  std::vector<Proposal> proposals;
};

// [{"video_id", "label", "segment": [start, end], "score"}, ...]
std::string ProposalsToJson(std::span<const VideoProposals> videos,
                            const std::vector<std::string>& class_names);

// CSV with columns t, class_0 .. class_C, w.
std::string CasTraceCsv(const TensorD& cas, std::span<const double> weights);

}  // namespace basnet

#endif  // BASNET_INFER_H_
