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
#include "basnet/graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace basnet {

template <typename Scalar>
std::size_t ParameterSet<Scalar>::Add(std::string name,
                                      BasicTensor<Scalar> value) {
  Require(Find(name) == entries_.size(), ErrorKind::kInvalidArgument,
          "duplicate parameter name: " + name);
  entries_.push_back({std::move(name), std::move(value)});
  return entries_.size() - 1;
}

template <typename Scalar>
std::size_t ParameterSet<Scalar>::Find(std::string_view name) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].name == name) return i;
  }
  return entries_.size();
}

template <typename Scalar>
ParameterSet<Scalar> ParameterSet<Scalar>::ZerosLike() const {
  ParameterSet out;
  for (const auto& e : entries_) {
    out.entries_.push_back({e.name, BasicTensor<Scalar>(e.value.shape())});
  }
  return out;
}

template <typename Scalar>
void ParameterSet<Scalar>::SetZero() {
  for (auto& e : entries_) e.value.Fill(Scalar(0));
}

template <typename Scalar>
void ParameterSet<Scalar>::AddScaled(const ParameterSet& other, Scalar scale) {
  Require(other.size() == size(), ErrorKind::kShape,
          "parameter set size mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto dst = entries_[i].value.values();
    auto src = other.entries_[i].value.values();
    Require(dst.size() == src.size(), ErrorKind::kShape,
            "parameter shape mismatch at " + entries_[i].name);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += scale * src[j];
  }
}

template <typename Scalar>
std::size_t ParameterSet<Scalar>::TotalSize() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

std::string_view OpKindName(OpKind op) {
  switch (op) {
    case OpKind::kInput: return "input";
    case OpKind::kParameter: return "parameter";
    case OpKind::kConv1d: return "conv1d";
    case OpKind::kRelu: return "relu";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kScaleTemporal: return "scale_temporal";
    case OpKind::kTopkMeanRows: return "topk_mean_rows";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kCrossEntropy: return "cross_entropy";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kSlice: return "slice";
    case OpKind::kWeightedSum: return "weighted_sum";
  }
  return "unknown";
}

namespace kernels {

template <typename Scalar>
Scalar TopkMean(std::span<const Scalar> scores, std::size_t k,
                std::vector<std::size_t>* selected) {
  Require(k >= 1 && k <= scores.size(), ErrorKind::kInvalidArgument,
          "top-k size " + std::to_string(k) + " outside [1, " +
              std::to_string(scores.size()) + "]");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores[a] != scores[b]) return scores[a] > scores[b];
                      return a < b;
                    });
  Scalar sum = 0;
  for (std::size_t i = 0; i < k; ++i) sum += scores[order[i]];
  if (selected != nullptr) selected->assign(order.begin(), order.begin() + k);
  return sum / static_cast<Scalar>(k);
}

template <typename Scalar>
std::vector<Scalar> Softmax(std::span<const Scalar> x) {
  Require(!x.empty(), ErrorKind::kShape, "softmax of empty vector");
  const Scalar max = *std::max_element(x.begin(), x.end());
  std::vector<Scalar> p(x.size());
  Scalar total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = std::exp(x[i] - max);
    total += p[i];
  }
  for (auto& v : p) {
    v /= total;
    // Keep every probability strictly positive even when exp underflows.
    v = std::max(v, std::numeric_limits<Scalar>::min());
  }
  return p;
}

template <typename Scalar>
Scalar Sigmoid(Scalar x) {
  Scalar s;
  if (x >= 0) {
    s = Scalar(1) / (Scalar(1) + std::exp(-x));
  } else {
    const Scalar e = std::exp(x);
    s = e / (Scalar(1) + e);
  }
  // Open interval (0, 1) even under saturation.
  return std::clamp(s, std::numeric_limits<Scalar>::min(),
                    std::nextafter(Scalar(1), Scalar(0)));
}

template float TopkMean(std::span<const float>, std::size_t,
                        std::vector<std::size_t>*);
template double TopkMean(std::span<const double>, std::size_t,
                         std::vector<std::size_t>*);
template std::vector<float> Softmax(std::span<const float>);
template std::vector<double> Softmax(std::span<const double>);
template float Sigmoid(float);
template double Sigmoid(double);

}  // namespace kernels

namespace {

constexpr double kLogClamp = 1e-12;

template <typename Scalar>
Scalar Dot(const Scalar* a, const Scalar* b, std::size_t n) {
  Scalar acc = 0;
#pragma omp simd reduction(+ : acc)
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename Scalar>
void Axpy(Scalar alpha, const Scalar* x, Scalar* y, std::size_t n) {
#pragma omp simd
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// Valid output range [lo, hi) for a tap whose input offset is `shift`.
inline void TapRange(std::ptrdiff_t shift, std::size_t t_len, std::size_t* lo,
                     std::size_t* hi) {
  const auto len = static_cast<std::ptrdiff_t>(t_len);
  *lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -shift));
  *hi = static_cast<std::size_t>(
      std::max<std::ptrdiff_t>(0, std::min(len, len - shift)));
}

}  // namespace

template <typename Scalar>
const typename Graph<Scalar>::Node& Graph<Scalar>::node(NodeId id) const {
  Require(id.index < nodes_.size(), ErrorKind::kInvalidArgument,
          "unknown graph node " + std::to_string(id.index));
  return nodes_[id.index];
}

template <typename Scalar>
typename Graph<Scalar>::Node& Graph<Scalar>::node(NodeId id) {
  Require(id.index < nodes_.size(), ErrorKind::kInvalidArgument,
          "unknown graph node " + std::to_string(id.index));
  return nodes_[id.index];
}

template <typename Scalar>
NodeId Graph<Scalar>::Push(Node n) {
  nodes_.push_back(std::move(n));
  return NodeId{nodes_.size() - 1};
}

template <typename Scalar>
bool Graph<Scalar>::AnyRequiresGrad(std::initializer_list<NodeId> ids) const {
  for (NodeId id : ids) {
    if (node(id).requires_grad) return true;
  }
  return false;
}

template <typename Scalar>
NodeId Graph<Scalar>::Input(TensorType value, bool requires_grad) {
  Node n{.op = OpKind::kInput, .value = std::move(value)};
  n.requires_grad = requires_grad;
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Parameter(const ParameterSet<Scalar>& params,
                                std::size_t index) {
  Node n{.op = OpKind::kParameter, .value = params.value(index)};
  n.requires_grad = true;
  n.param_index = index;
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Conv1d(NodeId input, NodeId kernel, NodeId bias) {
  const TensorType& x = value(input);
  const TensorType& w = value(kernel);
  const TensorType& b = value(bias);
  Require(x.rank() == 2, ErrorKind::kShape,
          "conv1d input must be Din x T, got " + ShapeString(x.shape()));
  Require(w.rank() == 3, ErrorKind::kShape,
          "conv1d kernel must be Dout x Din x K, got " + ShapeString(w.shape()));
  const std::size_t d_out = w.dim(0), d_in = w.dim(1), width = w.dim(2);
  const std::size_t t_len = x.dim(1);
  Require(x.dim(0) == d_in, ErrorKind::kShape,
          "conv1d input has " + std::to_string(x.dim(0)) +
              " channels, kernel expects " + std::to_string(d_in));
  Require(width % 2 == 1, ErrorKind::kShape,
          "conv1d kernel width must be odd, got " + std::to_string(width));
  Require(t_len >= 1, ErrorKind::kShape, "conv1d input has no time steps");
  RequireShape(b, {d_out}, "conv1d bias");

  TensorType out({d_out, t_len});
  const auto pad = static_cast<std::ptrdiff_t>(width / 2);
  for (std::size_t o = 0; o < d_out; ++o) {
    Scalar* y = out.row(o).data();
    std::fill(y, y + t_len, b[o]);
    for (std::size_t i = 0; i < d_in; ++i) {
      const Scalar* xi = x.row(i).data();
      for (std::size_t j = 0; j < width; ++j) {
        const Scalar wv = w[(o * d_in + i) * width + j];
        const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
        std::size_t lo, hi;
        TapRange(shift, t_len, &lo, &hi);
        if (lo >= hi) continue;
        Axpy(wv, xi + lo + shift, y + lo, hi - lo);
      }
    }
  }
  Node n{.op = OpKind::kConv1d, .inputs = {input, kernel, bias},
         .value = std::move(out)};
  n.requires_grad = AnyRequiresGrad({input, kernel, bias});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Relu(NodeId x) {
  TensorType out = value(x);
  for (auto& v : out.values()) v = v > 0 ? v : Scalar(0);
  Node n{.op = OpKind::kRelu, .inputs = {x}, .value = std::move(out)};
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Sigmoid(NodeId x) {
  TensorType out = value(x);
  for (auto& v : out.values()) v = kernels::Sigmoid(v);
  Node n{.op = OpKind::kSigmoid, .inputs = {x}, .value = std::move(out)};
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::ScaleTemporal(NodeId x, NodeId w) {
  const TensorType& xv = value(x);
  const TensorType& wv = value(w);
  Require(xv.rank() == 2, ErrorKind::kShape,
          "scale_temporal input must be D x T, got " + ShapeString(xv.shape()));
  Require(wv.size() == xv.cols(), ErrorKind::kShape,
          "scale_temporal weights have length " + std::to_string(wv.size()) +
              ", input has " + std::to_string(xv.cols()) + " time steps");
  TensorType out = xv;
  for (std::size_t d = 0; d < out.rows(); ++d) {
    auto row = out.row(d);
    for (std::size_t t = 0; t < row.size(); ++t) row[t] *= wv[t];
  }
  Node n{.op = OpKind::kScaleTemporal, .inputs = {x, w},
         .value = std::move(out)};
  n.requires_grad = AnyRequiresGrad({x, w});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::TopkMeanRows(NodeId x, std::size_t k,
                                   std::size_t num_rows) {
  const TensorType& xv = value(x);
  Require(xv.rank() == 2, ErrorKind::kShape,
          "top-k aggregation expects a 2D tensor, got " +
              ShapeString(xv.shape()));
  Require(num_rows >= 1 && num_rows <= xv.rows(), ErrorKind::kShape,
          "top-k aggregation over " + std::to_string(num_rows) +
              " rows of a tensor with " + std::to_string(xv.rows()));
  Node n{.op = OpKind::kTopkMeanRows, .inputs = {x},
         .value = TensorType({num_rows})};
  n.k = k;
  std::vector<std::size_t> picks;
  for (std::size_t r = 0; r < num_rows; ++r) {
    n.value[r] = kernels::TopkMean<Scalar>(xv.row(r), k, &picks);
    n.selected.insert(n.selected.end(), picks.begin(), picks.end());
  }
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Softmax(NodeId x) {
  const TensorType& xv = value(x);
  Require(xv.rank() == 1, ErrorKind::kShape,
          "softmax expects a vector, got " + ShapeString(xv.shape()));
  Node n{.op = OpKind::kSoftmax, .inputs = {x},
         .value = TensorType::Vector(kernels::Softmax<Scalar>(xv.values()))};
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::CrossEntropy(NodeId probs, TensorType target) {
  const TensorType& p = value(probs);
  Require(p.rank() == 1 && target.shape() == p.shape(), ErrorKind::kShape,
          "cross entropy target " + ShapeString(target.shape()) +
              " does not match probabilities " + ShapeString(p.shape()));
  Scalar loss = 0;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (target[c] == 0) continue;
    loss -= target[c] * std::log(std::max(p[c], static_cast<Scalar>(kLogClamp)));
  }
  Node n{.op = OpKind::kCrossEntropy, .inputs = {probs},
         .value = TensorType::Vector({loss})};
  n.target = std::move(target);
  n.requires_grad = AnyRequiresGrad({probs});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Mean(NodeId x) {
  const TensorType& xv = value(x);
  Scalar total = 0;
  for (Scalar v : xv.values()) total += v;
  Node n{.op = OpKind::kMean, .inputs = {x},
         .value = TensorType::Vector({total / static_cast<Scalar>(xv.size())})};
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Sum(NodeId x) {
  Scalar total = 0;
  for (Scalar v : value(x).values()) total += v;
  Node n{.op = OpKind::kSum, .inputs = {x},
         .value = TensorType::Vector({total})};
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::Slice(NodeId x, std::size_t begin, std::size_t end) {
  const TensorType& xv = value(x);
  Require(xv.rank() == 1 && begin < end && end <= xv.size(), ErrorKind::kShape,
          "slice [" + std::to_string(begin) + ", " + std::to_string(end) +
              ") of " + ShapeString(xv.shape()));
  Node n{.op = OpKind::kSlice, .inputs = {x},
         .value = TensorType::Vector(std::vector<Scalar>(
             xv.values().begin() + begin, xv.values().begin() + end))};
  n.k = begin;
  n.requires_grad = AnyRequiresGrad({x});
  return Push(std::move(n));
}

template <typename Scalar>
NodeId Graph<Scalar>::WeightedSum(std::span<const NodeId> terms,
                                  std::span<const Scalar> coeffs) {
  Require(terms.size() == coeffs.size() && !terms.empty(),
          ErrorKind::kInvalidArgument,
          "weighted sum needs one coefficient per term");
  Scalar total = 0;
  bool needs_grad = false;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const TensorType& v = value(terms[i]);
    Require(v.size() == 1, ErrorKind::kShape,
            "weighted sum terms must be scalars, got " +
                ShapeString(v.shape()));
    total += coeffs[i] * v[0];
    needs_grad = needs_grad || node(terms[i]).requires_grad;
  }
  Node n{.op = OpKind::kWeightedSum,
         .inputs = std::vector<NodeId>(terms.begin(), terms.end()),
         .value = TensorType::Vector({total})};
  n.coeffs.assign(coeffs.begin(), coeffs.end());
  n.requires_grad = needs_grad;
  return Push(std::move(n));
}

template <typename Scalar>
typename Graph<Scalar>::TensorType& Graph<Scalar>::GradOf(NodeId id) {
  Node& n = node(id);
  if (n.grad.empty()) n.grad = TensorType(n.value.shape());
  return n.grad;
}

template <typename Scalar>
void Graph<Scalar>::Backward(NodeId loss, ParameterSet<Scalar>* gradients) {
  Require(value(loss).size() == 1, ErrorKind::kShape,
          "backward needs a scalar loss, got " +
              ShapeString(value(loss).shape()));
  for (Node& n : nodes_) n.grad = TensorType();
  GradOf(loss)[0] = Scalar(1);
  for (std::size_t idx = loss.index + 1; idx-- > 0;) {
    Node& n = nodes_[idx];
    if (!n.requires_grad || n.grad.empty()) continue;
    if (n.op == OpKind::kParameter) {
      if (gradients != nullptr) {
        TensorType& slot = gradients->value(n.param_index);
        RequireShape(slot, n.value.shape(),
                     "gradient slot " + gradients->name(n.param_index));
        auto dst = slot.values();
        auto src = n.grad.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
      }
      continue;
    }
    BackwardNode(n);
  }
}

template <typename Scalar>
void Graph<Scalar>::BackwardNode(Node& n) {
  const TensorType& g = n.grad;
  switch (n.op) {
    case OpKind::kInput:
    case OpKind::kParameter:
      return;
    case OpKind::kConv1d: {
      const NodeId in_id = n.inputs[0], w_id = n.inputs[1], b_id = n.inputs[2];
      const TensorType& x = value(in_id);
      const TensorType& w = value(w_id);
      const std::size_t d_out = w.dim(0), d_in = w.dim(1), width = w.dim(2);
      const std::size_t t_len = x.dim(1);
      const auto pad = static_cast<std::ptrdiff_t>(width / 2);
      if (requires_grad(b_id)) {
        TensorType& gb = GradOf(b_id);
        for (std::size_t o = 0; o < d_out; ++o) {
          Scalar acc = 0;
          for (Scalar v : g.row(o)) acc += v;
          gb[o] += acc;
        }
      }
      const bool want_w = requires_grad(w_id);
      const bool want_x = requires_grad(in_id);
      TensorType* gw = want_w ? &GradOf(w_id) : nullptr;
      TensorType* gx = want_x ? &GradOf(in_id) : nullptr;
      for (std::size_t o = 0; o < d_out; ++o) {
        const Scalar* go = g.row(o).data();
        for (std::size_t i = 0; i < d_in; ++i) {
          const Scalar* xi = x.row(i).data();
          for (std::size_t j = 0; j < width; ++j) {
            const std::ptrdiff_t shift = static_cast<std::ptrdiff_t>(j) - pad;
            std::size_t lo, hi;
            TapRange(shift, t_len, &lo, &hi);
            if (lo >= hi) continue;
            const std::size_t widx = (o * d_in + i) * width + j;
            if (gw != nullptr) {
              (*gw)[widx] += Dot(go + lo, xi + lo + shift, hi - lo);
            }
            if (gx != nullptr) {
              Axpy(w[widx], go + lo, gx->row(i).data() + lo + shift, hi - lo);
            }
          }
        }
      }
      return;
    }
    case OpKind::kRelu: {
      const NodeId x = n.inputs[0];
      TensorType& gx = GradOf(x);
      const TensorType& xv = value(x);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (xv[i] > 0) gx[i] += g[i];
      }
      return;
    }
    case OpKind::kSigmoid: {
      TensorType& gx = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const Scalar s = n.value[i];
        gx[i] += g[i] * s * (Scalar(1) - s);
      }
      return;
    }
    case OpKind::kScaleTemporal: {
      const NodeId x = n.inputs[0], w = n.inputs[1];
      const TensorType& xv = value(x);
      const TensorType& wv = value(w);
      const std::size_t t_len = xv.cols();
      if (requires_grad(x)) {
        TensorType& gx = GradOf(x);
        for (std::size_t d = 0; d < xv.rows(); ++d) {
          for (std::size_t t = 0; t < t_len; ++t) {
            gx(d, t) += g(d, t) * wv[t];
          }
        }
      }
      if (requires_grad(w)) {
        TensorType& gw = GradOf(w);
        for (std::size_t d = 0; d < xv.rows(); ++d) {
          for (std::size_t t = 0; t < t_len; ++t) {
            gw[t] += g(d, t) * xv(d, t);
          }
        }
      }
      return;
    }
    case OpKind::kTopkMeanRows: {
      TensorType& gx = GradOf(n.inputs[0]);
      const Scalar inv_k = Scalar(1) / static_cast<Scalar>(n.k);
      for (std::size_t r = 0; r < n.value.size(); ++r) {
        for (std::size_t s = 0; s < n.k; ++s) {
          gx(r, n.selected[r * n.k + s]) += g[r] * inv_k;
        }
      }
      return;
    }
    case OpKind::kSoftmax: {
      TensorType& gx = GradOf(n.inputs[0]);
      Scalar dot = 0;
      for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * n.value[i];
      for (std::size_t i = 0; i < g.size(); ++i) {
        gx[i] += n.value[i] * (g[i] - dot);
      }
      return;
    }
    case OpKind::kCrossEntropy: {
      const NodeId p_id = n.inputs[0];
      TensorType& gp = GradOf(p_id);
      const TensorType& p = value(p_id);
      for (std::size_t c = 0; c < p.size(); ++c) {
        if (n.target[c] == 0 || p[c] <= static_cast<Scalar>(kLogClamp)) {
          continue;
        }
        gp[c] -= g[0] * n.target[c] / p[c];
      }
      return;
    }
    case OpKind::kMean: {
      TensorType& gx = GradOf(n.inputs[0]);
      const Scalar share = g[0] / static_cast<Scalar>(gx.size());
      for (auto& v : gx.values()) v += share;
      return;
    }
    case OpKind::kSum: {
      TensorType& gx = GradOf(n.inputs[0]);
      for (auto& v : gx.values()) v += g[0];
      return;
    }
    case OpKind::kSlice: {
      TensorType& gx = GradOf(n.inputs[0]);
      for (std::size_t i = 0; i < g.size(); ++i) gx[n.k + i] += g[i];
      return;
    }
    case OpKind::kWeightedSum: {
      for (std::size_t i = 0; i < n.inputs.size(); ++i) {
        if (!requires_grad(n.inputs[i])) continue;
        GradOf(n.inputs[i])[0] += g[0] * n.coeffs[i];
      }
      return;
    }
  }
}

template class ParameterSet<float>;
template class ParameterSet<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace basnet
