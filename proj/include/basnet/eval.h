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
#ifndef BASNET_EVAL_H_
#define BASNET_EVAL_H_

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "basnet/data.h"
#include "basnet/infer.h"

namespace basnet {

struct Detection {
  std::string video_id;
  int class_id = 0;
  double start_sec = 0;
  double end_sec = 0;
  double score = 0;
};

struct GroundTruth {
  std::string video_id;
  int class_id = 0;
  double start_sec = 0;
  double end_sec = 0;
};

// Temporal IoU of [a_start, a_end] and [b_start, b_end]; both must have
// start < end.
double Tiou(double a_start, double a_end, double b_start, double b_end);

// Non-interpolated AP for one class: predictions in descending score order
// each claim the unmatched same-video ground truth of highest tIoU, if that
// tIoU reaches `iou_threshold`. AP = sum of precision at each true positive
// / number of ground truths. nullopt when there is neither ground truth nor
// a prediction; 0 when only predictions exist.
std::optional<double> AveragePrecision(std::span<const Detection> predictions,
                                       std::span<const GroundTruth> gt,
                                       double iou_threshold);

std::vector<double> DefaultIouThresholds();  // 0.1, 0.2, ..., 0.9

struct EvalReport {
  std::vector<std::string> class_names;
  std::vector<double> thresholds;
  // ap[c][i]: AP of class c at thresholds[i]; nullopt for classes without
  // ground truth, which are left out of the mean.
  std::vector<std::vector<std::optional<double>>> ap;
  std::vector<double> map;
  double avg = 0;
  std::optional<double> background_f;
  std::size_t num_gt = 0;
  std::size_t num_predictions = 0;

  std::string ToJson() const;
  std::string ToTable() const;
};

EvalReport MapAt(std::span<const Detection> predictions,
                 std::span<const GroundTruth> gt,
                 const std::vector<std::string>& class_names,
                 const std::vector<double>& thresholds = DefaultIouThresholds());

// Micro-averaged F-measure with background as the positive class.
double FMeasureBackground(std::span<const std::vector<bool>> predicted,
                          std::span<const std::vector<bool>> truth);

// Segment t is background when its centre lies outside every interval.
std::vector<bool> GtBackgroundMask(std::span<const GtInterval> gt,
                                   const TimeMap& time_map);

// Parses a proposals file. Errors carry "<source>:<line>:".
std::vector<Detection> ParseProposals(std::string_view text,
                                      const std::string& source,
                                      const std::vector<std::string>& class_names);

// Ground truth restricted to `video_ids` when given.
std::vector<GroundTruth> GroundTruthFrom(
    const Annotations& annotations, const std::vector<std::string>& class_names,
    const std::optional<std::set<std::string>>& video_ids = std::nullopt);

}  // namespace basnet

#endif  // BASNET_EVAL_H_
