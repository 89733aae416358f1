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
#ifndef BASNET_DATA_H_
#define BASNET_DATA_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "basnet/objective.h"
#include "basnet/random.h"
#include "basnet/tensor.h"

namespace basnet {

// Every raw segment covers this many frames.
inline constexpr int kFramesPerSegment = 16;

enum class Split { kTrain, kTest };
std::string_view SplitName(Split split);
Split ParseSplit(std::string_view name);

struct GtInterval {
  int class_id = 0;
  double start_sec = 0;
  double end_sec = 0;

  friend bool operator==(const GtInterval&, const GtInterval&) = default;
};

struct VideoRecord {
  std::string id;
  Tensor features;  // L x D, one row per raw segment
  VideoLabel label;
  double fps = 25.0;
  Split split = Split::kTrain;
  std::vector<GtInterval> gt;

  std::size_t num_segments() const { return features.rows(); }
  std::size_t feature_dim() const { return features.cols(); }
  double duration_sec() const {
    return static_cast<double>(num_segments()) * kFramesPerSegment / fps;
  }
  void Validate(std::size_t num_classes) const;
};

struct Dataset {
  std::vector<std::string> class_names;
  std::vector<VideoRecord> records;

  int num_classes() const { return static_cast<int>(class_names.size()); }
  int ClassIndex(std::string_view name) const;  // -1 if unknown
  std::vector<const VideoRecord*> Select(Split split) const;
  void Validate() const;
};

// Stratified sampling: stratum i is [i L / T, (i+1) L / T) and one index is
// drawn uniformly inside it. Non-decreasing, always within [0, L).
std::vector<std::size_t> SampleTrain(std::size_t num_raw, std::size_t target,
                                     Rng& rng);
// index_i = floor(i L / T).
std::vector<std::size_t> SampleTest(std::size_t num_raw, std::size_t target);

// D x T map whose column t is features[indices[t]].
Tensor BuildFeatureMap(const VideoRecord& record,
                       std::span<const std::size_t> indices);

// Binary feature file: "BSNF", u32 version, u32 L, u32 D, L*D f32, all
// little-endian, segment-major.
inline constexpr std::uint32_t kFeatureFileVersion = 1;
void WriteFeatureFile(const std::filesystem::path& path, const Tensor& features);
Tensor ReadFeatureFile(const std::filesystem::path& path);
Tensor ParseFeatureBytes(std::span<const char> bytes);

struct NamedInterval {
  std::string label;
  double start_sec = 0;
  double end_sec = 0;
};
using Annotations = std::map<std::string, std::vector<NamedInterval>>;

// Dataset directory: manifest.json, annotations.json and features/<id>.bsnf.
void WriteDataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset ReadDataset(const std::filesystem::path& dir);
Annotations ReadAnnotations(const std::filesystem::path& path);
void WriteAnnotations(const Annotations& annotations,
                      const std::filesystem::path& path);
Annotations AnnotationsOf(const Dataset& dataset);

}  // namespace basnet

#endif  // BASNET_DATA_H_
