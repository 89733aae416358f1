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
#ifndef BASNET_TRAINER_H_
#define BASNET_TRAINER_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "basnet/checkpoint.h"
#include "basnet/data.h"
#include "basnet/model.h"
#include "basnet/objective.h"

namespace basnet {

struct TrainConfig {
  ObjectiveConfig objective;
  double lr = 1e-4;
  int batch_size = 16;
  int max_steps = 5000;
  std::uint64_t seed = 0;
  int checkpoint_interval = 0;  // 0 disables intermediate checkpoints
  int threads = 1;
  // Test hook: replace the filtering module output by a constant.
  std::optional<double> pinned_weight;

  void Validate() const;
};

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class AdamOptimizer {
 public:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  explicit AdamOptimizer(const ParameterSet<float>& params);

  void Apply(ParameterSet<float>& params, const ParameterSet<float>& grads,
             double lr);

  std::int64_t step() const { return step_; }
  const ParameterSet<float>& first_moment() const { return m_; }
  const ParameterSet<float>& second_moment() const { return v_; }

 private:
  ParameterSet<float> m_;
  ParameterSet<float> v_;
  std::int64_t step_ = 0;
};

// One joint forward/backward over `batch` followed by one Adam update.
// The batch-mean gradient is copied to `grads_out` when given.
LossBreakdown TrainStep(BasNet<float>& model,
                        std::span<const LabeledMap<float>> batch,
                        const TrainConfig& config, AdamOptimizer& optimizer,
                        ParameterSet<float>* grads_out = nullptr);

struct TrainOutputs {
  // Directory for checkpoint.bsnc, checkpoint_step<N>.bsnc and metrics.csv;
  // nothing is written when empty.
  std::filesystem::path dir;
  std::function<void(int step, const LossBreakdown&)> on_step;
};

struct TrainResult {
  BasNet<float> model;
  std::vector<LossBreakdown> history;
};

// Trains on the train split with epoch-wise shuffling from `config.seed`.
// The model is initialized from `model_config` (including its seed).
TrainResult Train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainOutputs& outputs = {});

// Metrics log row: step,l_base,l_supp,l_norm,l_overall
std::string MetricsRow(int step, const LossBreakdown& loss);

}  // namespace basnet

#endif  // BASNET_TRAINER_H_
