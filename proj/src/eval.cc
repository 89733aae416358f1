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
#include "basnet/eval.h"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>

#include "basnet/json_util.h"

namespace basnet {

double Tiou(double a_start, double a_end, double b_start, double b_end) {
  Require(a_start < a_end && b_start < b_end, ErrorKind::kInvalidArgument,
          "tIoU needs intervals with start < end");
  return TemporalIou(a_start, a_end, b_start, b_end);
}

std::optional<double> AveragePrecision(std::span<const Detection> predictions,
                                       std::span<const GroundTruth> gt,
                                       double iou_threshold) {
  if (gt.empty()) {
    if (predictions.empty()) return std::nullopt;
    return 0.0;
  }
  std::map<std::string, std::vector<std::size_t>> by_video;
  for (std::size_t g = 0; g < gt.size(); ++g) by_video[gt[g].video_id].push_back(g);

  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].score > predictions[b].score;
  });

  std::vector<bool> used(gt.size(), false);
  std::size_t true_positives = 0;
  double precision_sum = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const Detection& p = predictions[order[rank]];
    const auto it = by_video.find(p.video_id);
    if (it == by_video.end()) continue;
    double best_iou = -1;
    std::size_t best = gt.size();
    for (std::size_t g : it->second) {
      if (used[g]) continue;
      const double iou =
          TemporalIou(p.start_sec, p.end_sec, gt[g].start_sec, gt[g].end_sec);
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    if (best < gt.size() && best_iou >= iou_threshold) {
      used[best] = true;
      ++true_positives;
      precision_sum += static_cast<double>(true_positives) /
                       static_cast<double>(rank + 1);
    }
  }
  return precision_sum / static_cast<double>(gt.size());
}

std::vector<double> DefaultIouThresholds() {
  std::vector<double> out;
  for (int i = 1; i <= 9; ++i) out.push_back(i / 10.0);
  return out;
}

EvalReport MapAt(std::span<const Detection> predictions,
                 std::span<const GroundTruth> gt,
                 const std::vector<std::string>& class_names,
                 const std::vector<double>& thresholds) {
  const int num_classes = static_cast<int>(class_names.size());
  EvalReport report;
  report.class_names = class_names;
  report.thresholds = thresholds;
  report.num_gt = gt.size();
  report.num_predictions = predictions.size();

  std::vector<std::vector<Detection>> preds_by_class(num_classes);
  std::vector<std::vector<GroundTruth>> gt_by_class(num_classes);
  for (const auto& p : predictions) {
    Require(p.class_id >= 0 && p.class_id < num_classes, ErrorKind::kMismatch,
            "prediction for unknown class id " + std::to_string(p.class_id));
    preds_by_class[p.class_id].push_back(p);
  }
  for (const auto& g : gt) {
    Require(g.class_id >= 0 && g.class_id < num_classes, ErrorKind::kMismatch,
            "ground truth for unknown class id " + std::to_string(g.class_id));
    gt_by_class[g.class_id].push_back(g);
  }

  report.ap.assign(num_classes,
                   std::vector<std::optional<double>>(thresholds.size()));
  report.map.assign(thresholds.size(), 0.0);
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    double total = 0;
    int counted = 0;
    for (int c = 0; c < num_classes; ++c) {
      if (gt_by_class[c].empty()) continue;
      const auto ap =
          AveragePrecision(preds_by_class[c], gt_by_class[c], thresholds[i]);
      report.ap[c][i] = ap;
      total += *ap;
      ++counted;
    }
    report.map[i] = counted > 0 ? total / counted : 0.0;
  }
  if (!report.map.empty()) {
    report.avg = std::accumulate(report.map.begin(), report.map.end(), 0.0) /
                 static_cast<double>(report.map.size());
  }
  return report;
}

std::string EvalReport::ToJson() const {
  Json root;
  root["thresholds"] = thresholds;
  root["map"] = map;
  root["avg"] = avg;
  Json per_class = Json::object();
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    Json row = Json::array();
    for (const auto& v : ap[c]) row.push_back(v ? Json(*v) : Json(nullptr));
    per_class[class_names[c]] = std::move(row);
  }
  root["per_class"] = std::move(per_class);
  root["background_f_measure"] =
      background_f ? Json(*background_f) : Json(nullptr);
  root["num_gt"] = num_gt;
  root["num_predictions"] = num_predictions;
  return root.dump(2) + "\n";
}

std::string EvalReport::ToTable() const {
  std::string out = "mAP@IoU  ";
  char buf[32];
  for (double t : thresholds) {
    std::snprintf(buf, sizeof(buf), "%7.2f", t);
    out += buf;
  }
  out += "      AVG\n         ";
  for (double m : map) {
    std::snprintf(buf, sizeof(buf), "%7.4f", m);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "  %7.4f\n", avg);
  out += buf;
  if (background_f) {
    std::snprintf(buf, sizeof(buf), "%.4f\n", *background_f);
    out += "background F-measure: ";
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%zu", num_gt);
  out += "ground truth: " + std::string(buf);
  std::snprintf(buf, sizeof(buf), "%zu", num_predictions);
  out += ", predictions: " + std::string(buf) + "\n";
  return out;
}

double FMeasureBackground(std::span<const std::vector<bool>> predicted,
                          std::span<const std::vector<bool>> truth) {
  Require(predicted.size() == truth.size(), ErrorKind::kShape,
          "predicted and ground-truth mask counts differ");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t v = 0; v < predicted.size(); ++v) {
    Require(predicted[v].size() == truth[v].size(), ErrorKind::kShape,
            "mask length mismatch for video " + std::to_string(v));
    for (std::size_t t = 0; t < truth[v].size(); ++t) {
      if (predicted[v][t] && truth[v][t]) ++tp;
      if (predicted[v][t] && !truth[v][t]) ++fp;
      if (!predicted[v][t] && truth[v][t]) ++fn;
    }
  }
  if (tp + fp == 0 || tp + fn == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  if (precision + recall == 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

std::vector<bool> GtBackgroundMask(std::span<const GtInterval> gt,
                                   const TimeMap& time_map) {
  std::vector<bool> mask(time_map.num_sampled, true);
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const double centre = 0.5 * (time_map.Start(t) + time_map.End(t));
    for (const auto& g : gt) {
      if (centre >= g.start_sec && centre <= g.end_sec) {
        mask[t] = false;
        break;
      }
    }
  }
  return mask;
}

std::vector<Detection> ParseProposals(std::string_view text,
                                      const std::string& source,
                                      const std::vector<std::string>& class_names) {
  const Json root = ParseJsonText(text, source);
  if (!root.is_array()) {
    Fail(ErrorKind::kParse, source + ":1: proposals must be a JSON list");
  }
  const auto lines = ArrayElementLines(text, "");
  std::vector<Detection> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const Json& e = root[i];
    const std::string where =
        source + ":" + std::to_string(i < lines.size() ? lines[i] : 0) + ": ";
    const bool ok = e.is_object() && e.contains("video_id") &&
                    e["video_id"].is_string() && e.contains("label") &&
                    e["label"].is_string() && e.contains("segment") &&
                    e["segment"].is_array() && e["segment"].size() == 2 &&
                    e["segment"][0].is_number() && e["segment"][1].is_number() &&
                    e.contains("score") && e["score"].is_number();
    if (!ok) {
      Fail(ErrorKind::kParse,
           where + "proposal needs video_id, label, segment [start, end], score");
    }
    const std::string label = e["label"].get<std::string>();
    const auto it = std::find(class_names.begin(), class_names.end(), label);
    if (it == class_names.end()) {
      Fail(ErrorKind::kParse, where + "unknown class '" + label + "'");
    }
    Detection d{e["video_id"].get<std::string>(),
                static_cast<int>(it - class_names.begin()),
                e["segment"][0].get<double>(), e["segment"][1].get<double>(),
                e["score"].get<double>()};
    if (!(d.start_sec < d.end_sec)) {
      Fail(ErrorKind::kParse, where + "segment needs start < end");
    }
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<GroundTruth> GroundTruthFrom(
    const Annotations& annotations, const std::vector<std::string>& class_names,
    const std::optional<std::set<std::string>>& video_ids) {
  std::vector<GroundTruth> out;
  for (const auto& [id, list] : annotations) {
    if (video_ids && !video_ids->contains(id)) continue;
    for (const auto& a : list) {
      const auto it = std::find(class_names.begin(), class_names.end(), a.label);
      Require(it != class_names.end(), ErrorKind::kParse,
              "annotation of " + id + " uses unknown class '" + a.label + "'");
      out.push_back({id, static_cast<int>(it - class_names.begin()),
                     a.start_sec, a.end_sec});
    }
  }
  return out;
}

}  // namespace basnet
