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
#include "basnet/model.h"

#include <cmath>
#include <string>

#include "basnet/random.h"

namespace basnet {

void ModelConfig::Validate() const {
  Require(num_classes >= 1, ErrorKind::kInvalidArgument,
          "num_classes must be >= 1");
  Require(feature_dim >= 1, ErrorKind::kInvalidArgument,
          "feature_dim must be >= 1");
  Require(num_segments >= 1, ErrorKind::kInvalidArgument,
          "num_segments must be >= 1");
  Require(hidden_dim >= 0, ErrorKind::kInvalidArgument,
          "hidden_dim must be >= 0");
  Require(cas_kernel >= 1 && cas_kernel % 2 == 1, ErrorKind::kInvalidArgument,
          "cas_kernel must be a positive odd integer, got " +
              std::to_string(cas_kernel));
  Require(filter_hidden >= 1, ErrorKind::kInvalidArgument,
          "filter_hidden must be >= 1");
}

namespace {

template <typename Scalar>
void AddConv(ParameterSet<Scalar>& params, const std::string& prefix,
             std::size_t d_out, std::size_t d_in, std::size_t width, Rng& rng) {
  BasicTensor<Scalar> weight({d_out, d_in, width});
  const double bound = std::sqrt(1.0 / static_cast<double>(d_in * width));
  for (auto& v : weight.values()) {
    v = static_cast<Scalar>(UniformRange(rng, -bound, bound));
  }
  params.Add(prefix + ".weight", std::move(weight));
  params.Add(prefix + ".bias", BasicTensor<Scalar>({d_out}));
}

Shape ConvWeightShape(int d_out, int d_in, int width) {
  return {static_cast<std::size_t>(d_out), static_cast<std::size_t>(d_in),
          static_cast<std::size_t>(width)};
}

}  // namespace

template <typename Scalar>
BasNet<Scalar> BasNet<Scalar>::Create(const ModelConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  ParameterSet<Scalar> params;
  const std::size_t d = config.feature_dim, h = config.hidden(),
                    c1 = config.num_classes + 1, hf = config.filter_hidden,
                    k = config.cas_kernel;
  AddConv(params, "head.conv1", h, d, k, rng);
  AddConv(params, "head.conv2", c1, h, 1, rng);
  AddConv(params, "filter.conv1", hf, d, k, rng);
  AddConv(params, "filter.conv2", 1, hf, 1, rng);
  return BasNet(config, std::move(params));
}

template <typename Scalar>
BasNet<Scalar>::BasNet(ModelConfig config, ParameterSet<Scalar> params)
    : config_(config), params_(std::move(params)) {
  config_.Validate();
  const int c1 = config_.num_classes + 1;
  const struct {
    const char* name;
    Shape shape;
  } expected[] = {
      {"head.conv1.weight",
       ConvWeightShape(config_.hidden(), config_.feature_dim, config_.cas_kernel)},
      {"head.conv1.bias", {static_cast<std::size_t>(config_.hidden())}},
      {"head.conv2.weight", ConvWeightShape(c1, config_.hidden(), 1)},
      {"head.conv2.bias", {static_cast<std::size_t>(c1)}},
      {"filter.conv1.weight",
       ConvWeightShape(config_.filter_hidden, config_.feature_dim,
                       config_.cas_kernel)},
      {"filter.conv1.bias", {static_cast<std::size_t>(config_.filter_hidden)}},
      {"filter.conv2.weight", ConvWeightShape(1, config_.filter_hidden, 1)},
      {"filter.conv2.bias", {1}},
  };
  Require(params_.size() == std::size(expected), ErrorKind::kMismatch,
          "model expects " + std::to_string(std::size(expected)) +
              " parameters, got " + std::to_string(params_.size()));
  for (std::size_t i = 0; i < std::size(expected); ++i) {
    Require(params_.name(i) == expected[i].name, ErrorKind::kMismatch,
            "parameter " + std::to_string(i) + " is " + params_.name(i) +
                ", expected " + expected[i].name);
    RequireShape(params_.value(i), expected[i].shape, expected[i].name);
  }
}

template <typename Scalar>
typename BasNet<Scalar>::BoundStack BasNet<Scalar>::Bind(Graph<Scalar>& graph,
                                                        Conv first,
                                                        Conv second) const {
  return {{graph.Parameter(params_, first.weight),
           graph.Parameter(params_, first.bias)},
          {graph.Parameter(params_, second.weight),
           graph.Parameter(params_, second.bias)}};
}

template <typename Scalar>
NodeId BasNet<Scalar>::Stack(Graph<Scalar>& graph, const BoundStack& s,
                             NodeId x) const {
  const NodeId hidden =
      graph.Relu(graph.Conv1d(x, s.first.weight, s.first.bias));
  return graph.Conv1d(hidden, s.second.weight, s.second.bias);
}

template <typename Scalar>
JointNodes BasNet<Scalar>::Build(Graph<Scalar>& graph, NodeId x,
                                 const ForwardOptions& options) const {
  const auto& xv = graph.value(x);
  Require(xv.rank() == 2 &&
              xv.rows() == static_cast<std::size_t>(config_.feature_dim),
          ErrorKind::kShape,
          "feature map must be " + std::to_string(config_.feature_dim) +
              " x T, got " + ShapeString(xv.shape()));
  // Adding nodes may reallocate the graph, so keep only the length.
  const std::size_t length = xv.cols();
  JointNodes out;
  if (!options.base && !options.suppression) return out;

  const BoundStack head = Bind(graph, head_conv1(), head_conv2());
  if (options.base) out.cas_base = Stack(graph, head, x);
  if (options.suppression) {
    NodeId weights;
    if (options.pinned_weight.has_value()) {
      weights = graph.Input(BasicTensor<Scalar>(
          {length}, static_cast<Scalar>(*options.pinned_weight)));
    } else {
      const BoundStack filter = Bind(graph, filter_conv1(), filter_conv2());
      weights = graph.Sigmoid(Stack(graph, filter, x));
    }
    // The filter emits a 1 x T map; ScaleTemporal only reads its T values.
    out.weights = weights;
    const NodeId filtered = graph.ScaleTemporal(x, weights);
    out.cas_supp = Stack(graph, head, filtered);
  }
  return out;
}

template <typename Scalar>
BasicTensor<Scalar> ForwardBase(const BasNet<Scalar>& model,
                                const BasicTensor<Scalar>& x) {
  Graph<Scalar> graph;
  const auto nodes = model.Build(graph, graph.Input(x),
                                 {.base = true, .suppression = false, .pinned_weight = {}});
  return graph.value(*nodes.cas_base);
}

template <typename Scalar>
BasicTensor<Scalar> ForwardFilter(const BasNet<Scalar>& model,
                                  const BasicTensor<Scalar>& x) {
  const auto out = ForwardSuppression(model, x);
  return out.weights;
}

template <typename Scalar>
JointOutput<Scalar> ForwardSuppression(const BasNet<Scalar>& model,
                                       const BasicTensor<Scalar>& x,
                                       std::optional<double> pinned_weight) {
  Graph<Scalar> graph;
  const auto nodes =
      model.Build(graph, graph.Input(x),
                  {.base = false, .suppression = true,
                   .pinned_weight = pinned_weight});
  JointOutput<Scalar> out;
  out.cas_supp = graph.value(*nodes.cas_supp);
  const auto& w = graph.value(*nodes.weights);
  out.weights = BasicTensor<Scalar>::Vector(w.storage());
  return out;
}

template <typename Scalar>
JointOutput<Scalar> ForwardJoint(const BasNet<Scalar>& model,
                                 const BasicTensor<Scalar>& x,
                                 std::optional<double> pinned_weight) {
  Graph<Scalar> graph;
  const auto nodes = model.Build(
      graph, graph.Input(x),
      {.base = true, .suppression = true, .pinned_weight = pinned_weight});
  JointOutput<Scalar> out;
  out.cas_base = graph.value(*nodes.cas_base);
  out.cas_supp = graph.value(*nodes.cas_supp);
  out.weights = BasicTensor<Scalar>::Vector(graph.value(*nodes.weights).storage());
  return out;
}

template class BasNet<float>;
template class BasNet<double>;

#define BASNET_INSTANTIATE_FORWARD(S)                                         \
  template BasicTensor<S> ForwardBase(const BasNet<S>&, const BasicTensor<S>&); \
  template BasicTensor<S> ForwardFilter(const BasNet<S>&,                     \
                                        const BasicTensor<S>&);               \
  template JointOutput<S> ForwardSuppression(                                 \
      const BasNet<S>&, const BasicTensor<S>&, std::optional<double>);        \
  template JointOutput<S> ForwardJoint(const BasNet<S>&, const BasicTensor<S>&, \
                                       std::optional<double>);

BASNET_INSTANTIATE_FORWARD(float)
BASNET_INSTANTIATE_FORWARD(double)

#undef BASNET_INSTANTIATE_FORWARD

}  // namespace basnet
