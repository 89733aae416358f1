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
#include "basnet/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>

namespace basnet {

void SyntheticSpec::Validate() const {
  auto check = [](bool ok, const std::string& what) {
    Require(ok, ErrorKind::kInvalidArgument, "synthetic settings: " + what);
  };
  check(num_classes >= 1, "num_classes must be >= 1");
  check(feature_dim >= num_classes + 1,
        "feature_dim must be >= num_classes + 1 for orthogonal prototypes");
  check(min_segments >= 1 && min_segments <= max_segments,
        "need 1 <= min_segments <= max_segments");
  check(num_train >= 0 && num_test >= 0 && num_train + num_test >= 1,
        "need at least one video");
  check(min_classes_per_video >= 1 &&
            min_classes_per_video <= max_classes_per_video &&
            min_classes_per_video <= num_classes,
        "invalid classes-per-video range");
  check(min_intervals >= 1 && min_intervals <= max_intervals,
        "invalid interval count range");
  check(std::min(max_classes_per_video, num_classes) <= max_intervals,
        "max_intervals must allow one interval per class");
  check(min_interval_length >= 1 &&
            min_interval_length <= max_interval_length,
        "invalid interval length range");
  check(separation > 0, "separation must be > 0");
  check(noise >= 0, "noise must be >= 0");
  check(fps > 0, "fps must be > 0");
  // Worst case: the most intervals at the longest length, one gap between
  // neighbours and at least one background segment, in the shortest video.
  const long worst = static_cast<long>(max_intervals) * max_interval_length +
                     max_intervals;
  Require(worst <= min_segments, ErrorKind::kInvalidArgument,
          "synthetic settings: infeasible packing, " +
              std::to_string(max_intervals) + " intervals of length " +
              std::to_string(max_interval_length) +
              " plus gaps need " + std::to_string(worst) +
              " segments but videos may have only " +
              std::to_string(min_segments));
}

namespace {

Tensor OrthonormalPrototypes(int count, int dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> basis;
  while (static_cast<int>(basis.size()) < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = gauss(rng);
    for (const auto& b : basis) {
      const double dot = std::inner_product(v.begin(), v.end(), b.begin(), 0.0);
      for (int i = 0; i < dim; ++i) v[i] -= dot * b[i];
    }
    const double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    if (norm < 1e-6) continue;
    for (double& x : v) x /= norm;
    basis.push_back(std::move(v));
  }
  Tensor out({static_cast<std::size_t>(count), static_cast<std::size_t>(dim)});
  for (int r = 0; r < count; ++r) {
    for (int i = 0; i < dim; ++i) out(r, i) = static_cast<float>(basis[r][i]);
  }
  return out;
}

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(UniformInt(rng, 0, i - 1));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

SyntheticData GenerateSynthetic(const SyntheticSpec& spec) {
  spec.Validate();
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int num_classes = spec.num_classes;
  const int dim = spec.feature_dim;

  SyntheticData out;
  out.prototypes = OrthonormalPrototypes(num_classes + 1, dim, rng);
  for (int c = 0; c < num_classes; ++c) {
    out.dataset.class_names.push_back("class_" + std::to_string(c));
  }

  const int total = spec.num_train + spec.num_test;
  for (int v = 0; v < total; ++v) {
    const bool train = v < spec.num_train;
    char id[32];
    std::snprintf(id, sizeof(id), "%s_%04d", train ? "train" : "test",
                  train ? v : v - spec.num_train);

    const int length =
        static_cast<int>(UniformInt(rng, spec.min_segments, spec.max_segments));
    const int num_video_classes = static_cast<int>(UniformInt(
        rng, spec.min_classes_per_video,
        std::min(spec.max_classes_per_video, num_classes)));
    std::vector<int> pool(num_classes);
    std::iota(pool.begin(), pool.end(), 0);
    Shuffle(pool, rng);
    pool.resize(num_video_classes);

    const int count = static_cast<int>(UniformInt(
        rng, std::max(num_video_classes, spec.min_intervals), spec.max_intervals));
    std::vector<int> classes(count);
    for (int i = 0; i < count; ++i) {
      classes[i] = i < num_video_classes
                       ? pool[i]
                       : pool[UniformInt(rng, 0, num_video_classes - 1)];
    }
    Shuffle(classes, rng);
    std::vector<int> lengths(count);
    int occupied = 0;
    for (int& len : lengths) {
      len = static_cast<int>(UniformInt(rng, spec.min_interval_length,
                                        spec.max_interval_length));
      occupied += len;
    }

    // count + 1 gaps; inner gaps get one segment up front, the remaining
    // free segments (>= 1 by validation) are split at random cut points.
    const int spare = length - occupied - (count - 1);
    std::vector<int> cuts(count);
    for (int& c : cuts) c = static_cast<int>(UniformInt(rng, 0, spare));
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> gaps(count + 1);
    int prev = 0;
    for (int i = 0; i < count; ++i) {
      gaps[i] = cuts[i] - prev + (i > 0 ? 1 : 0);
      prev = cuts[i];
    }
    gaps[count] = spare - prev;

    std::vector<int> seg_class(length, num_classes);
    VideoRecord record;
    record.id = id;
    record.fps = spec.fps;
    record.split = train ? Split::kTrain : Split::kTest;
    int cursor = 0;
    for (int i = 0; i < count; ++i) {
      cursor += gaps[i];
      for (int t = cursor; t < cursor + lengths[i]; ++t) seg_class[t] = classes[i];
      const double sec_per_segment = kFramesPerSegment / spec.fps;
      record.gt.push_back({classes[i], cursor * sec_per_segment,
                           (cursor + lengths[i]) * sec_per_segment});
      cursor += lengths[i];
    }

    record.features = Tensor({static_cast<std::size_t>(length),
                              static_cast<std::size_t>(dim)});
    for (int t = 0; t < length; ++t) {
      const auto proto = out.prototypes.row(seg_class[t]);
      for (int i = 0; i < dim; ++i) {
        record.features(t, i) = static_cast<float>(
            spec.separation * proto[i] + spec.noise * gauss(rng));
      }
    }
    record.label = VideoLabel::FromClasses(num_classes, pool);
    out.dataset.records.push_back(std::move(record));
    out.segment_classes.push_back(std::move(seg_class));
  }
  out.dataset.Validate();
  return out;
}

}  // namespace basnet
