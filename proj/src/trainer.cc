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
#include "basnet/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include <spdlog/spdlog.h>

namespace basnet {

void TrainConfig::Validate() const {
  Require(lr >= 0, ErrorKind::kInvalidArgument, "lr must be >= 0");
  Require(batch_size >= 1, ErrorKind::kInvalidArgument,
          "batch_size must be >= 1");
  Require(max_steps >= 0, ErrorKind::kInvalidArgument, "max_steps must be >= 0");
  Require(checkpoint_interval >= 0, ErrorKind::kInvalidArgument,
          "checkpoint_interval must be >= 0");
  Require(threads >= 1, ErrorKind::kInvalidArgument, "threads must be >= 1");
  Require(objective.alpha >= 0 && objective.beta >= 0 && objective.gamma >= 0,
          ErrorKind::kInvalidArgument, "loss weights must be >= 0");
  Require(objective.r > 0, ErrorKind::kInvalidArgument, "r must be > 0");
}

AdamOptimizer::AdamOptimizer(const ParameterSet<float>& params)
    : m_(params.ZerosLike()), v_(params.ZerosLike()) {}

void AdamOptimizer::Apply(ParameterSet<float>& params,
                          const ParameterSet<float>& grads, double lr) {
  ++step_;
  const double correction1 = 1.0 - std::pow(kBeta1, static_cast<double>(step_));
  const double correction2 = 1.0 - std::pow(kBeta2, static_cast<double>(step_));
  const auto b1 = static_cast<float>(kBeta1);
  const auto b2 = static_cast<float>(kBeta2);
  const auto step_size = static_cast<float>(lr / correction1);
  const auto inv_sqrt_c2 = static_cast<float>(1.0 / std::sqrt(correction2));
  const auto eps = static_cast<float>(kEpsilon);
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto w = params.value(p).values();
    auto g = grads.value(p).values();
    auto m = m_.value(p).values();
    auto v = v_.value(p).values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      m[i] = b1 * m[i] + (1.0f - b1) * g[i];
      v[i] = b2 * v[i] + (1.0f - b2) * g[i] * g[i];
      w[i] -= step_size * m[i] / (std::sqrt(v[i]) * inv_sqrt_c2 + eps);
    }
  }
}

LossBreakdown TrainStep(BasNet<float>& model,
                        std::span<const LabeledMap<float>> batch,
                        const TrainConfig& config, AdamOptimizer& optimizer,
                        ParameterSet<float>* grads_out) {
  Require(!batch.empty(), ErrorKind::kInvalidArgument,
          "train step needs a non-empty batch");
  ParameterSet<float> grads = model.params().ZerosLike();
  const LossBreakdown loss = BatchObjective<float>(
      model, batch, config.objective, &grads,
      {.pinned_weight = config.pinned_weight, .threads = config.threads});
  optimizer.Apply(model.mutable_params(), grads, config.lr);
  if (grads_out != nullptr) *grads_out = std::move(grads);
  return loss;
}

std::string MetricsRow(int step, const LossBreakdown& loss) {
  char line[160];
  std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.9g", step, loss.l_base,
                loss.l_supp, loss.l_norm, loss.l_overall);
  return line;
}

namespace {

// Cycles through epoch-wise permutations of [0, n).
class BatchSampler {
 public:
  BatchSampler(std::size_t n, Rng& rng) : n_(n), rng_(rng) {}

  std::size_t Next() {
    if (cursor_ == order_.size()) {
      order_.resize(n_);
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      for (std::size_t i = n_; i > 1; --i) {
        std::swap(order_[i - 1],
                  order_[static_cast<std::size_t>(UniformInt(rng_, 0, i - 1))]);
      }
      cursor_ = 0;
    }
    return order_[cursor_++];
  }

 private:
  std::size_t n_;
  Rng& rng_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

}  // namespace

TrainResult Train(const Dataset& dataset, const ModelConfig& model_config,
                  const TrainConfig& config, const TrainOutputs& outputs) {
  config.Validate();
  model_config.Validate();
  Require(model_config.num_classes == dataset.num_classes(), ErrorKind::kMismatch,
          "model has " + std::to_string(model_config.num_classes) +
              " classes, dataset has " + std::to_string(dataset.num_classes()));
  const auto videos = dataset.Select(Split::kTrain);
  Require(!videos.empty() || config.max_steps == 0, ErrorKind::kInvalidArgument,
          "dataset has no training videos");

  TrainResult result{BasNet<float>::Create(model_config), {}};
  const CheckpointMeta meta{model_config, config.objective.mode,
                            config.objective.r};
  const bool write = !outputs.dir.empty();
  std::ofstream metrics;
  if (write) {
    std::filesystem::create_directories(outputs.dir);
    const auto path = outputs.dir / "metrics.csv";
    metrics.open(path, std::ios::trunc);
    Require(metrics.good(), ErrorKind::kIo, "cannot write " + path.string());
    metrics << "step,l_base,l_supp,l_norm,l_overall\n";
  }

  Rng rng(config.seed);
  BatchSampler sampler(videos.size(), rng);
  AdamOptimizer optimizer(result.model.params());
  const auto num_segments = static_cast<std::size_t>(model_config.num_segments);
  const std::size_t batch_size =
      std::min<std::size_t>(config.batch_size, std::max<std::size_t>(videos.size(), 1));

  std::vector<Tensor> maps(batch_size);
  std::vector<LabeledMap<float>> batch(batch_size);
  for (int step = 1; step <= config.max_steps; ++step) {
    for (std::size_t b = 0; b < batch_size; ++b) {
      const VideoRecord& video = *videos[sampler.Next()];
      const auto indices = SampleTrain(video.num_segments(), num_segments, rng);
      maps[b] = BuildFeatureMap(video, indices);
      batch[b] = {&maps[b], &video.label};
    }
    const LossBreakdown loss = TrainStep(result.model, batch, config, optimizer);
    result.history.push_back(loss);
    if (write) metrics << MetricsRow(step, loss) << '\n';
    if (outputs.on_step) outputs.on_step(step, loss);
    if (step == 1 || step % 100 == 0) {
      spdlog::info("step {:5d}  l_base {:.4f}  l_supp {:.4f}  l_norm {:.4f}  "
                   "l_overall {:.4f}",
                   step, loss.l_base, loss.l_supp, loss.l_norm, loss.l_overall);
    }
    if (write && config.checkpoint_interval > 0 &&
        step % config.checkpoint_interval == 0 && step != config.max_steps) {
      SaveCheckpoint(result.model, meta,
                     outputs.dir / ("checkpoint_step" + std::to_string(step) +
                                    ".bsnc"));
    }
  }
  if (write) {
    metrics.flush();
    Require(metrics.good(), ErrorKind::kIo, "failed writing metrics.csv");
    SaveCheckpoint(result.model, meta, outputs.dir / "checkpoint.bsnc");
  }
  return result;
}

}  // namespace basnet
