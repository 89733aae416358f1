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
#ifndef BASNET_SYNTHETIC_H_
#define BASNET_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "basnet/data.h"

namespace basnet {

// Generator parameters. Interval lengths are in raw segments.
struct SyntheticSpec {
  int num_classes = 4;
  int feature_dim = 32;
  int min_segments = 40;
  int max_segments = 120;
  int num_train = 200;
  int num_test = 50;
  int min_classes_per_video = 1;
  int max_classes_per_video = 1;
  int min_intervals = 1;
  int max_intervals = 2;
  int min_interval_length = 8;
  int max_interval_length = 18;
  double separation = 1.0;  // prototype scale s
  double noise = 0.5;       // per-dimension Gaussian sigma
  double fps = 25.0;
  std::uint64_t seed = 7;

  void Validate() const;
};

struct SyntheticData {
  Dataset dataset;
  Tensor prototypes;  // (C+1) x D, orthonormal rows; row C is background
  // Per record, the class of every raw segment (C marks background).
  std::vector<std::vector<int>> segment_classes;
};

// Videos made of non-overlapping action intervals on a background stream.
// A segment's feature is s * prototype(class) + sigma * N(0, I). Each video
// has at least one background segment, and its label is the union of the
// classes of its intervals. Deterministic for a given spec.
SyntheticData GenerateSynthetic(const SyntheticSpec& spec);

}  // namespace basnet

#endif  // BASNET_SYNTHETIC_H_
