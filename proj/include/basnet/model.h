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
#ifndef BASNET_MODEL_H_
#define BASNET_MODEL_H_

#include <cstdint>
#include <optional>

#include "basnet/graph.h"

namespace basnet {

struct ModelConfig {
  int num_classes = 0;      // C; the activation sequence has C + 1 rows
  int feature_dim = 0;      // D
  int num_segments = 750;   // T, sampled segments per video
  int hidden_dim = 0;       // 0 means "same as feature_dim"
  int cas_kernel = 3;       // odd temporal width of the first layers
  int filter_hidden = 512;
  std::uint64_t seed = 0;

  int hidden() const { return hidden_dim > 0 ? hidden_dim : feature_dim; }
  int background_index() const { return num_classes; }
  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Which branches to materialize in a forward pass. `pinned_weight` replaces
// the filtering module output by a constant, bypassing its parameters.
struct ForwardOptions {
  bool base = true;
  bool suppression = true;
  std::optional<double> pinned_weight;
};

struct JointNodes {
  std::optional<NodeId> cas_base;
  std::optional<NodeId> cas_supp;
  std::optional<NodeId> weights;
};

template <typename Scalar>
struct JointOutput {
  BasicTensor<Scalar> cas_base;  // A,  (C+1) x T
  BasicTensor<Scalar> cas_supp;  // A', (C+1) x T
  BasicTensor<Scalar> weights;   // W,  T
};

// Shared CAS head (conv D->H width K, ReLU, conv H->C+1 width 1) plus the
// filtering module (conv D->Hf width K, ReLU, conv Hf->1 width 1, sigmoid).
// Both branches bind the same head parameters; there is exactly one copy.
template <typename Scalar>
class BasNet {
 public:
  struct Conv {
    std::size_t weight;
    std::size_t bias;
  };

  // Uniform(-a, a) weights with a = sqrt(1 / (fan_in * K)), zero biases.
  static BasNet Create(const ModelConfig& config);

  // Adopts existing parameters; names and shapes must match `config`.
  BasNet(ModelConfig config, ParameterSet<Scalar> params);

  const ModelConfig& config() const { return config_; }
  const ParameterSet<Scalar>& params() const { return params_; }
  ParameterSet<Scalar>& mutable_params() { return params_; }

  Conv head_conv1() const { return {0, 1}; }
  Conv head_conv2() const { return {2, 3}; }
  Conv filter_conv1() const { return {4, 5}; }
  Conv filter_conv2() const { return {6, 7}; }
  bool IsFilterParam(std::size_t index) const { return index >= 4; }

  // Builds A and/or A' (and W) for one feature map `x` (D x T) on `graph`.
  JointNodes Build(Graph<Scalar>& graph, NodeId x,
                   const ForwardOptions& options = {}) const;

  template <typename Other>
  BasNet<Other> Cast() const {
    return BasNet<Other>(config_, params_.template Cast<Other>());
  }

 private:
  struct BoundConv {
    NodeId weight;
    NodeId bias;
  };
  struct BoundStack {
    BoundConv first;
    BoundConv second;
  };

  BoundStack Bind(Graph<Scalar>& graph, Conv first, Conv second) const;
  NodeId Stack(Graph<Scalar>& graph, const BoundStack& s, NodeId x) const;

  ModelConfig config_;
  ParameterSet<Scalar> params_;
};

// Value-level forward passes. `x` must be D x T.
template <typename Scalar>
BasicTensor<Scalar> ForwardBase(const BasNet<Scalar>& model,
                                const BasicTensor<Scalar>& x);
template <typename Scalar>
BasicTensor<Scalar> ForwardFilter(const BasNet<Scalar>& model,
                                  const BasicTensor<Scalar>& x);
// Returns A' and W; cas_base is left empty.
template <typename Scalar>
JointOutput<Scalar> ForwardSuppression(
    const BasNet<Scalar>& model, const BasicTensor<Scalar>& x,
    std::optional<double> pinned_weight = std::nullopt);
template <typename Scalar>
JointOutput<Scalar> ForwardJoint(
    const BasNet<Scalar>& model, const BasicTensor<Scalar>& x,
    std::optional<double> pinned_weight = std::nullopt);

extern template class BasNet<float>;
extern template class BasNet<double>;

}  // namespace basnet

#endif  // BASNET_MODEL_H_
