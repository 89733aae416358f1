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
#ifndef BASNET_COMMANDS_H_
#define BASNET_COMMANDS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "basnet/checkpoint.h"
#include "basnet/data.h"
#include "basnet/eval.h"
#include "basnet/grad_check.h"
#include "basnet/infer.h"

namespace basnet {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitCheck = 3;

int ExitCodeFor(ErrorKind kind);

// Proposals for every video of `split`, in dataset order.
std::vector<VideoProposals> InferSplit(const Checkpoint& checkpoint,
                                       const Dataset& dataset,
                                       const InferConfig& config, Split split);

std::vector<Detection> ToDetections(std::span<const VideoProposals> videos);

// Ground truth of the videos in `split`, taken from the dataset records.
std::vector<GroundTruth> SplitGroundTruth(const Dataset& dataset, Split split);

enum class BackgroundRule {
  kCasArgmax,     // background row wins the softmaxed column (A or A')
  kFilterWeight,  // W_t < 0.5; base-branch modes fall back to kCasArgmax
};
BackgroundRule ParseBackgroundRule(std::string_view name);

// Background F-measure of the checkpoint over `split`. The CAS rule uses A
// for base-branch modes and A' otherwise; baseline checkpoints are rejected.
double BackgroundFMeasure(const Checkpoint& checkpoint, const Dataset& dataset,
                          Split split,
                          BackgroundRule rule = BackgroundRule::kCasArgmax);

// Finite-difference check of the full objective on a tiny model (C=3, D=8,
// T=12, batch 2) in double precision. `inject_error` perturbs one analytic
// gradient entry as a negative control.
GradCheckReport TinyGradCheck(std::uint64_t seed, bool inject_error = false);

// Entry point of the basnet tool. args[0] is the program name.
int RunCli(const std::vector<std::string>& args);

}  // namespace basnet

#endif  // BASNET_COMMANDS_H_
