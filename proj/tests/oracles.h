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
#ifndef BASNET_TESTS_ORACLES_H_
#define BASNET_TESTS_ORACLES_H_

// Deliberately naive reference implementations. They share no code with the
// library so that agreement is evidence rather than tautology.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

namespace basnet {
namespace oracle {

// Full descending sort, then the mean of the first k values (summed in that
// order).
template <typename Scalar>
Scalar TopkMean(std::vector<Scalar> v, std::size_t k) {
  std::sort(v.begin(), v.end(), std::greater<Scalar>());
  Scalar sum = 0;
  for (std::size_t i = 0; i < k; ++i) sum += v[i];
  return sum / static_cast<Scalar>(k);
}

inline double Iou(double as, double ae, double bs, double be) {
  const double lo = as > bs ? as : bs;
  const double hi = ae < be ? ae : be;
  const double inter = hi > lo ? hi - lo : 0.0;
  const double uni = (ae - as) + (be - bs) - inter;
  return uni > 0 ? inter / uni : 0.0;
}

struct Box {
  double start;
  double end;
  double score;
};

// Exhaustive greedy NMS: scan everything still alive for the best box (higher
// score, then earlier start, then earlier end, then lower input position),
// emit it, kill every survivor overlapping it at >= threshold. Returns input
// positions.
inline std::vector<std::size_t> Nms(const std::vector<Box>& boxes,
                                    double threshold) {
  std::vector<bool> alive(boxes.size(), true);
  std::vector<std::size_t> order;
  while (true) {
    std::size_t best = boxes.size();
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (!alive[i]) continue;
      if (best == boxes.size() || boxes[i].score > boxes[best].score ||
          (boxes[i].score == boxes[best].score &&
           (boxes[i].start < boxes[best].start ||
            (boxes[i].start == boxes[best].start &&
             boxes[i].end < boxes[best].end)))) {
        best = i;
      }
    }
    if (best == boxes.size()) break;
    order.push_back(best);
    alive[best] = false;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      if (alive[i] && Iou(boxes[best].start, boxes[best].end, boxes[i].start,
                          boxes[i].end) >= threshold) {
        alive[i] = false;
      }
    }
  }
  return order;
}

struct Pred {
  std::string video;
  double start;
  double end;
  double score;
};
struct Truth {
  std::string video;
  double start;
  double end;
};

// AP as the area under the stepwise precision/recall curve, sum over ranks
// of (recall_i - recall_{i-1}) * precision_i, after building the full tIoU
// matrix and matching greedily in rank order. Returns -1 when undefined.
inline double AveragePrecision(const std::vector<Pred>& preds,
                               const std::vector<Truth>& truths,
                               double threshold) {
  if (truths.empty()) return preds.empty() ? -1.0 : 0.0;
  std::vector<std::size_t> rank(preds.size());
  std::iota(rank.begin(), rank.end(), std::size_t{0});
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return preds[a].score > preds[b].score;
  });
  std::vector<std::vector<double>> iou(preds.size(),
                                       std::vector<double>(truths.size(), -1));
  for (std::size_t p = 0; p < preds.size(); ++p) {
    for (std::size_t g = 0; g < truths.size(); ++g) {
      if (preds[p].video == truths[g].video) {
        iou[p][g] = Iou(preds[p].start, preds[p].end, truths[g].start,
                        truths[g].end);
      }
    }
  }
  std::vector<bool> taken(truths.size(), false);
  double tp = 0;
  double previous_recall = 0;
  double area = 0;
  for (std::size_t i = 0; i < rank.size(); ++i) {
    const std::size_t p = rank[i];
    int pick = -1;
    for (std::size_t g = 0; g < truths.size(); ++g) {
      if (taken[g] || iou[p][g] < 0) continue;
      if (pick < 0 || iou[p][g] > iou[p][pick]) pick = static_cast<int>(g);
    }
    if (pick >= 0 && iou[p][pick] >= threshold) {
      taken[pick] = true;
      tp += 1;
    }
    const double recall = tp / static_cast<double>(truths.size());
    const double precision = tp / static_cast<double>(i + 1);
    area += (recall - previous_recall) * precision;
    previous_recall = recall;
  }
  return area;
}

}  // namespace oracle
}  // namespace basnet

#endif  // BASNET_TESTS_ORACLES_H_
