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
#include "basnet/infer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "basnet/json_util.h"
#include "basnet/objective.h"

namespace basnet {

std::vector<double> DefaultActThresholds() {
  std::vector<double> out;
  for (int i = 0; i <= 20; ++i) out.push_back(i / 40.0);
  return out;
}

void InferConfig::Validate() const {
  Require(theta_class >= 0 && theta_class <= 1, ErrorKind::kInvalidArgument,
          "theta_class must lie in [0, 1]");
  Require(!theta_act.empty(), ErrorKind::kInvalidArgument,
          "need at least one activation threshold");
  for (double t : theta_act) {
    Require(t >= 0 && t <= 1, ErrorKind::kInvalidArgument,
            "activation thresholds must lie in [0, 1]");
  }
  Require(nms_iou > 0 && nms_iou <= 1, ErrorKind::kInvalidArgument,
          "nms_iou must lie in (0, 1]");
}

double IndexToSeconds(std::size_t t, std::size_t num_raw,
                      std::size_t num_sampled, double fps) {
  return static_cast<double>(t) * static_cast<double>(num_raw) /
         static_cast<double>(num_sampled) * kFramesPerSegment / fps;
}

double TimeMap::Start(std::size_t t) const {
  return IndexToSeconds(t, num_raw, num_sampled, fps);
}

double TimeMap::End(std::size_t t) const { return Start(t + 1); }

double TimeMap::Duration() const { return Start(num_sampled); }

std::vector<int> SelectClasses(std::span<const double> probs, int num_classes,
                               double theta) {
  Require(static_cast<int>(probs.size()) >= num_classes, ErrorKind::kShape,
          "fewer probabilities than action classes");
  std::vector<int> out;
  for (int c = 0; c < num_classes; ++c) {
    if (probs[c] >= theta) out.push_back(c);
  }
  return out;
}

TensorD NormalizeCas(const TensorD& cas) {
  Require(cas.rank() == 2 && cas.cols() >= 1, ErrorKind::kShape,
          "activation sequence must be rows x T with T >= 1");
  TensorD out(cas.shape());
  for (std::size_t r = 0; r < cas.rows(); ++r) {
    const auto row = cas.row(r);
    const auto [lo, hi] = std::minmax_element(row.begin(), row.end());
    const double range = *hi - *lo;
    auto dst = out.row(r);
    if (range <= 0) continue;
    for (std::size_t t = 0; t < row.size(); ++t) {
      dst[t] = (row[t] - *lo) / range;
    }
  }
  return out;
}

std::vector<IndexInterval> ExtractSegments(std::span<const double> row,
                                           double theta) {
  std::vector<IndexInterval> out;
  std::size_t t = 0;
  while (t < row.size()) {
    if (row[t] < theta) {
      ++t;
      continue;
    }
    const std::size_t start = t;
    while (t < row.size() && row[t] >= theta) ++t;
    out.push_back({start, t - 1});
  }
  return out;
}

double ContrastScore(std::span<const double> row, IndexInterval interval) {
  Require(interval.start <= interval.end && interval.end < row.size(),
          ErrorKind::kInvalidArgument, "interval outside the sequence");
  const std::size_t len = interval.end - interval.start + 1;
  double inner = 0;
  for (std::size_t t = interval.start; t <= interval.end; ++t) inner += row[t];
  inner /= static_cast<double>(len);

  const std::size_t flank = std::max<std::size_t>(1, len / 4);
  const std::size_t left_lo =
      interval.start >= flank ? interval.start - flank : 0;
  const std::size_t right_hi = std::min(row.size(), interval.end + 1 + flank);
  double outer = 0;
  std::size_t count = 0;
  for (std::size_t t = left_lo; t < interval.start; ++t, ++count) outer += row[t];
  for (std::size_t t = interval.end + 1; t < right_hi; ++t, ++count) {
    outer += row[t];
  }
  const double outer_mean = count > 0 ? outer / static_cast<double>(count) : 0.0;
  return inner - outer_mean;
}

double TemporalIou(double a_start, double a_end, double b_start, double b_end) {
  const double inter =
      std::max(0.0, std::min(a_end, b_end) - std::max(a_start, b_start));
  const double uni = (a_end - a_start) + (b_end - b_start) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

std::vector<Proposal> Nms(std::vector<Proposal> proposals,
                          double iou_threshold) {
  std::stable_sort(proposals.begin(), proposals.end(),
                   [](const Proposal& a, const Proposal& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.start_sec != b.start_sec) return a.start_sec < b.start_sec;
                     // Makes the result independent of input order.
                     return a.end_sec < b.end_sec;
                   });
  std::vector<Proposal> kept;
  std::vector<bool> removed(proposals.size(), false);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (removed[i]) continue;
    const Proposal& best = proposals[i];
    kept.push_back(best);
    for (std::size_t j = i + 1; j < proposals.size(); ++j) {
      if (removed[j] || proposals[j].class_id != best.class_id) continue;
      const Proposal& other = proposals[j];
      if (TemporalIou(best.start_sec, best.end_sec, other.start_sec,
                      other.end_sec) >= iou_threshold) {
        removed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<Proposal> Localize(const TensorD& cas, std::span<const double> probs,
                               int num_classes, const InferConfig& config,
                               const TimeMap& time_map) {
  config.Validate();
  Require(cas.rank() == 2 && static_cast<int>(cas.rows()) >= num_classes,
          ErrorKind::kShape, "activation sequence has too few rows");
  Require(cas.cols() == time_map.num_sampled, ErrorKind::kShape,
          "time map does not match the activation sequence length");
  const TensorD normalized = NormalizeCas(cas);
  std::vector<Proposal> out;
  for (int c : SelectClasses(probs, num_classes, config.theta_class)) {
    const auto row = normalized.row(c);
    std::vector<Proposal> pooled;
    for (double theta : config.theta_act) {
      std::vector<Proposal> level;
      for (const IndexInterval& seg : ExtractSegments(row, theta)) {
        double score = ContrastScore(row, seg);
        if (config.multiply_class_prob) score *= probs[c];
        level.push_back({c, time_map.Start(seg.start), time_map.End(seg.end),
                         score, theta});
      }
      if (!config.pool_before_nms) level = Nms(std::move(level), config.nms_iou);
      pooled.insert(pooled.end(), level.begin(), level.end());
    }
    if (config.pool_before_nms) pooled = Nms(std::move(pooled), config.nms_iou);
    out.insert(out.end(), pooled.begin(), pooled.end());
  }
  return out;
}

std::vector<bool> BackgroundMask(const TensorD& cas, int num_classes) {
  Require(cas.rank() == 2 && static_cast<int>(cas.rows()) == num_classes + 1,
          ErrorKind::kInvalidArgument,
          "background prediction needs a sequence with a background row");
  std::vector<bool> mask(cas.cols());
  for (std::size_t t = 0; t < cas.cols(); ++t) {
    std::vector<double> column(cas.rows());
    for (std::size_t r = 0; r < cas.rows(); ++r) column[r] = cas(r, t);
    const auto probs = kernels::Softmax<double>(column);
    const auto best = std::max_element(probs.begin(), probs.end());
    mask[t] = static_cast<int>(best - probs.begin()) == num_classes;
  }
  return mask;
}

std::vector<bool> BackgroundMaskFromWeights(std::span<const double> weights,
                                            double threshold) {
  std::vector<bool> mask(weights.size());
  for (std::size_t t = 0; t < weights.size(); ++t) {
    mask[t] = weights[t] < threshold;
  }
  return mask;
}

Branch InferenceBranch(TrainMode mode) {
  return mode == TrainMode::kSuppOnly || mode == TrainMode::kFull
             ? Branch::kSuppression
             : Branch::kBase;
}

VideoOutputs RunVideo(const Checkpoint& checkpoint, const VideoRecord& video) {
  const ModelConfig& config = checkpoint.meta.model;
  const std::size_t num_sampled = config.num_segments;
  const auto indices = SampleTest(video.num_segments(), num_sampled);
  const Tensor x = BuildFeatureMap(video, indices);
  const JointOutput<float> joint = ForwardJoint(checkpoint.model, x);

  VideoOutputs out;
  out.cas_base = joint.cas_base.Cast<double>();
  out.cas_supp = joint.cas_supp.Cast<double>();
  out.weights.assign(joint.weights.values().begin(), joint.weights.values().end());
  out.time_map = {video.num_segments(), num_sampled, video.fps};

  const double r = checkpoint.meta.r;
  std::vector<double> base_scores = Aggregate(out.cas_base, r);
  if (checkpoint.meta.mode == TrainMode::kBaseline) {
    base_scores.pop_back();
  }
  out.probs_base = ClassProbs<double>(base_scores);
  out.probs_supp = ClassProbs<double>(Aggregate(out.cas_supp, r));
  return out;
}

std::vector<Proposal> InferVideo(const Checkpoint& checkpoint,
                                 const VideoOutputs& outputs,
                                 const InferConfig& config) {
  const int num_classes = checkpoint.meta.model.num_classes;
  if (InferenceBranch(checkpoint.meta.mode) == Branch::kBase) {
    return Localize(outputs.cas_base, outputs.probs_base, num_classes, config,
                    outputs.time_map);
  }
  return Localize(outputs.cas_supp, outputs.probs_supp, num_classes, config,
                  outputs.time_map);
}

std::string ProposalsToJson(std::span<const VideoProposals> videos,
                            const std::vector<std::string>& class_names) {
  // One proposal per line so parse errors can point at a line.
  std::string out = "[";
  bool first = true;
  for (const auto& v : videos) {
    for (const auto& p : v.proposals) {
      Json entry = {{"video_id", v.video_id},
                    {"label", class_names.at(p.class_id)},
                    {"segment", {p.start_sec, p.end_sec}},
                    {"score", p.score}};
      out += first ? "\n " : ",\n ";
      out += entry.dump();
      first = false;
    }
  }
  out += first ? "]\n" : "\n]\n";
  return out;
}

std::string CasTraceCsv(const TensorD& cas, std::span<const double> weights) {
  Require(weights.size() == cas.cols(), ErrorKind::kShape,
          "trace weights do not match the sequence length");
  std::string out = "t";
  for (std::size_t c = 0; c < cas.rows(); ++c) {
    out += ",class_" + std::to_string(c);
  }
  out += ",w\n";
  char buf[32];
  for (std::size_t t = 0; t < cas.cols(); ++t) {
    out += std::to_string(t);
    for (std::size_t c = 0; c < cas.rows(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.9g", cas(c, t));
      out += buf;
    }
    std::snprintf(buf, sizeof(buf), ",%.9g\n", weights[t]);
    out += buf;
  }
  return out;
}

}  // namespace basnet
