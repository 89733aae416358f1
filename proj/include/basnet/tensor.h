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
#ifndef BASNET_TENSOR_H_
#define BASNET_TENSOR_H_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "basnet/error.h"

namespace basnet {

using Shape = std::vector<std::size_t>;

std::string ShapeString(const Shape& shape);
std::size_t ShapeSize(const Shape& shape);

// Dense row-major tensor of rank 1..3. Rank 2 is the (channels x time)
// layout used for feature maps and activation sequences; rank 3 holds
// convolution kernels (out x in x width).
template <typename Scalar>
class BasicTensor {
 public:
  using value_type = Scalar;

  BasicTensor() = default;
  explicit BasicTensor(Shape shape, Scalar fill = Scalar(0))
      : shape_(std::move(shape)), data_(ShapeSize(shape_), fill) {
    Require(!shape_.empty() && shape_.size() <= 3, ErrorKind::kShape,
            "tensor rank must be 1..3, got " + ShapeString(shape_));
  }
  BasicTensor(Shape shape, std::vector<Scalar> values)
      : shape_(std::move(shape)), data_(std::move(values)) {
    Require(!shape_.empty() && shape_.size() <= 3, ErrorKind::kShape,
            "tensor rank must be 1..3, got " + ShapeString(shape_));
    Require(data_.size() == ShapeSize(shape_), ErrorKind::kShape,
            "value count " + std::to_string(data_.size()) +
                " does not match shape " + ShapeString(shape_));
  }

  static BasicTensor Vector(std::vector<Scalar> values) {
    const std::size_t n = values.size();
    return BasicTensor({n}, std::move(values));
  }
  static BasicTensor Matrix(std::size_t rows, std::size_t cols,
                            std::vector<Scalar> values) {
    return BasicTensor({rows, cols}, std::move(values));
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // For rank-2 tensors; a rank-1 tensor is treated as a single row.
  std::size_t rows() const { return shape_.size() == 1 ? 1 : shape_[0]; }
  std::size_t cols() const { return shape_.back(); }

  Scalar& operator[](std::size_t i) { return data_[i]; }
  const Scalar& operator[](std::size_t i) const { return data_[i]; }
  Scalar& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols() + c];
  }
  const Scalar& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols() + c];
  }

  std::span<Scalar> values() { return data_; }
  std::span<const Scalar> values() const { return data_; }
  std::span<Scalar> row(std::size_t r) {
    return std::span<Scalar>(data_).subspan(r * cols(), cols());
  }
  std::span<const Scalar> row(std::size_t r) const {
    return std::span<const Scalar>(data_).subspan(r * cols(), cols());
  }
  const std::vector<Scalar>& storage() const { return data_; }

  void Fill(Scalar v) { std::fill(data_.begin(), data_.end(), v); }

  template <typename Other>
  BasicTensor<Other> Cast() const {
    return BasicTensor<Other>(shape_,
                              std::vector<Other>(data_.begin(), data_.end()));
  }

  friend bool operator==(const BasicTensor&, const BasicTensor&) = default;

 private:
  Shape shape_;
  std::vector<Scalar> data_;
};

using Tensor = BasicTensor<float>;
using TensorD = BasicTensor<double>;

// Raises kShape unless `t` has exactly `expected` dimensions.
template <typename Scalar>
void RequireShape(const BasicTensor<Scalar>& t, const Shape& expected,
                  std::string_view what) {
  if (t.shape() != expected) {
    Fail(ErrorKind::kShape, std::string(what) + ": expected shape " +
                                ShapeString(expected) + ", got " +
                                ShapeString(t.shape()));
  }
}

}  // namespace basnet

#endif  // BASNET_TENSOR_H_
