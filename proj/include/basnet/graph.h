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
#ifndef BASNET_GRAPH_H_
#define BASNET_GRAPH_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "basnet/tensor.h"

namespace basnet {

// An ordered collection of named tensors. Model parameters, their gradients
// and optimizer moments all use this type so that index i always refers to
// the same logical parameter.
template <typename Scalar>
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    BasicTensor<Scalar> value;
  };

  std::size_t Add(std::string name, BasicTensor<Scalar> value);

  std::size_t size() const { return entries_.size(); }
  const std::string& name(std::size_t i) const { return entries_.at(i).name; }
  const BasicTensor<Scalar>& value(std::size_t i) const {
    return entries_.at(i).value;
  }
  BasicTensor<Scalar>& value(std::size_t i) { return entries_.at(i).value; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Index of `name`, or size() when absent.
  std::size_t Find(std::string_view name) const;

  // Same names and shapes, all values zero.
  ParameterSet ZerosLike() const;
  void SetZero();

  // this += scale * other, entry by entry. Shapes must match.
  void AddScaled(const ParameterSet& other, Scalar scale);

  std::size_t TotalSize() const;

  template <typename Other>
  ParameterSet<Other> Cast() const {
    ParameterSet<Other> out;
    for (const auto& e : entries_) out.Add(e.name, e.value.template Cast<Other>());
    return out;
  }

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
      if (a.entries_[i].name != b.entries_[i].name ||
          !(a.entries_[i].value == b.entries_[i].value)) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<Entry> entries_;
};

struct NodeId {
  std::size_t index = 0;
  friend bool operator==(NodeId, NodeId) = default;
};

enum class OpKind {
  kInput,
  kParameter,
  kConv1d,
  kRelu,
  kSigmoid,
  kScaleTemporal,
  kTopkMeanRows,
  kSoftmax,
  kCrossEntropy,
  kMean,
  kSum,
  kSlice,
  kWeightedSum,
};

std::string_view OpKindName(OpKind op);

// Reverse-mode tape over the handful of operations the network needs.
// Nodes are appended in evaluation order, so every node's inputs precede it
// and Backward() can walk the node list back to front.
template <typename Scalar>
class Graph {
 public:
  using TensorType = BasicTensor<Scalar>;

  NodeId Input(TensorType value, bool requires_grad = false);
  // Leaf bound to `params.value(index)`. Gradients reaching this node are
  // accumulated into slot `index` of the set handed to Backward(). Create one
  // node per parameter and reuse it wherever the parameter is shared.
  NodeId Parameter(const ParameterSet<Scalar>& params, std::size_t index);

  // Same-length temporal convolution with zero padding.
  // input: Din x T, kernel: Dout x Din x K (K odd), bias: Dout.
  NodeId Conv1d(NodeId input, NodeId kernel, NodeId bias);
  NodeId Relu(NodeId x);
  NodeId Sigmoid(NodeId x);
  // out[d, t] = x[d, t] * w[t]
  NodeId ScaleTemporal(NodeId x, NodeId w);
  // Top-k mean of each of the first `num_rows` rows of a 2D tensor.
  NodeId TopkMeanRows(NodeId x, std::size_t k, std::size_t num_rows);
  NodeId Softmax(NodeId x);
  // sum_c -target[c] * log(max(p[c], 1e-12)), a scalar.
  NodeId CrossEntropy(NodeId probs, TensorType target);
  NodeId Mean(NodeId x);
  NodeId Sum(NodeId x);
  // Elements [begin, end) of a vector.
  NodeId Slice(NodeId x, std::size_t begin, std::size_t end);
  // sum_i coeffs[i] * terms[i] over scalar nodes.
  NodeId WeightedSum(std::span<const NodeId> terms,
                     std::span<const Scalar> coeffs);

  const TensorType& value(NodeId id) const { return node(id).value; }
  // Gradient of the last Backward() loss w.r.t. this node. Empty for nodes
  // that do not depend on any grad-requiring leaf.
  const TensorType& grad(NodeId id) const { return node(id).grad; }
  OpKind op(NodeId id) const { return node(id).op; }
  const std::vector<NodeId>& inputs(NodeId id) const {
    return node(id).inputs;
  }
  bool requires_grad(NodeId id) const { return node(id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse-mode sweep from a scalar `loss`. Parameter gradients are added
  // to `gradients` (when non-null), so repeated calls accumulate.
  void Backward(NodeId loss, ParameterSet<Scalar>* gradients);

 private:
  struct Node {
    OpKind op = OpKind::kInput;
    std::vector<NodeId> inputs = {};
    TensorType value = {};
    TensorType grad = {};
    bool requires_grad = false;
    std::size_t param_index = 0;
    std::vector<std::size_t> selected = {};  // top-k picks, row-major per row
    std::size_t k = 0;                       // top-k size or slice begin
    std::vector<Scalar> coeffs = {};
    TensorType target = {};
  };

  const Node& node(NodeId id) const;
  Node& node(NodeId id);
  NodeId Push(Node n);
  bool AnyRequiresGrad(std::initializer_list<NodeId> ids) const;
  void BackwardNode(Node& n);
  TensorType& GradOf(NodeId id);

  std::vector<Node> nodes_;
};

namespace kernels {

// Mean of the k largest entries. Ties prefer the lower index. The chosen
// indices are written to `selected` (in selection order) when non-null.
template <typename Scalar>
Scalar TopkMean(std::span<const Scalar> scores, std::size_t k,
                std::vector<std::size_t>* selected = nullptr);

// Max-shifted softmax.
template <typename Scalar>
std::vector<Scalar> Softmax(std::span<const Scalar> x);

template <typename Scalar>
Scalar Sigmoid(Scalar x);

}  // namespace kernels

extern template class ParameterSet<float>;
extern template class ParameterSet<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace basnet

#endif  // BASNET_GRAPH_H_
