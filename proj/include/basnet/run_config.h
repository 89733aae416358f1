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
#ifndef BASNET_RUN_CONFIG_H_
#define BASNET_RUN_CONFIG_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "basnet/infer.h"
#include "basnet/model.h"
#include "basnet/synthetic.h"
#include "basnet/trainer.h"

namespace basnet {

// Flat settings for every command. Files use INI sections [model], [train],
// [infer] and [data]; each "section.key" maps to one field below.
struct RunConfig {
  ModelConfig model;  // num_classes and feature_dim come from the dataset
  TrainConfig train;
  InferConfig infer;
  SyntheticSpec data;
  double theta_act_step = 0.025;
  double theta_act_max = 0.5;

  // Rebuilds infer.theta_act from the step settings.
  void SyncThresholds();
};

// Sets "section.key" from its text form. Unknown keys and malformed values
// raise kInvalidArgument.
void ApplySetting(RunConfig& config, std::string_view key,
                  std::string_view value);

// Reads an INI file and applies every entry.
void ApplyConfigFile(RunConfig& config, const std::filesystem::path& path);

std::vector<std::string> SettingKeys();

}  // namespace basnet

#endif  // BASNET_RUN_CONFIG_H_
