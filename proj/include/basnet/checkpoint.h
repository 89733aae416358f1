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
#ifndef BASNET_CHECKPOINT_H_
#define BASNET_CHECKPOINT_H_

#include <filesystem>
#include <span>
#include <string>

#include "basnet/data.h"
#include "basnet/model.h"
#include "basnet/objective.h"

namespace basnet {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Settings echoed into every checkpoint so inference can rebuild the model
// and pick the branch matching the training mode.
struct CheckpointMeta {
  ModelConfig model;
  TrainMode mode = TrainMode::kFull;
  double r = 8.0;

  friend bool operator==(const CheckpointMeta&, const CheckpointMeta&) = default;
};

struct Checkpoint {
  CheckpointMeta meta;
  BasNet<float> model;
};

// Layout (little-endian): "BSNC", u32 version, u32 C, u32 D, u32 T, u32 H,
// u32 K, u32 Hf, u64 seed, u32 mode, f64 r, then per parameter: u32 name
// length, name bytes, u32 rank, u32 dims[rank], f32 values.
std::string EncodeCheckpoint(const BasNet<float>& model,
                             const CheckpointMeta& meta);
Checkpoint DecodeCheckpoint(std::span<const char> bytes);

void SaveCheckpoint(const BasNet<float>& model, const CheckpointMeta& meta,
                    const std::filesystem::path& path);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// Rejects a checkpoint whose class count or feature width disagrees with
// the dataset it is about to be applied to.
void RequireCompatible(const CheckpointMeta& meta, const Dataset& dataset);

}  // namespace basnet

#endif  // BASNET_CHECKPOINT_H_
