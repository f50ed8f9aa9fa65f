// Copyright 2026 The protoaudio Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PROTOAUDIO_DIFF_TENSOR_HPP_
#define PROTOAUDIO_DIFF_TENSOR_HPP_

#include <cstddef>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "protoaudio/error.hpp"

namespace protoaudio::diff {

using Shape = std::vector<std::size_t>;

inline std::size_t NumElements(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

inline std::string ShapeString(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

// Dense row-major tensor. Scalars have shape {1}.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> data;
  bool requires_grad = false;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0))
      : shape(std::move(s)), data(NumElements(shape), fill) {}
  Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
    if (NumElements(shape) != data.size()) {
      throw Error(ErrorKind::kShapeMismatch,
                  "shape " + ShapeString(shape) + " does not hold " +
                      std::to_string(data.size()) + " values");
    }
  }

  static Tensor Scalar(T v) { return Tensor({1}, std::vector<T>{v}); }

  std::size_t size() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }
  T item() const { return data.at(0); }

  template <typename U>
  Tensor<U> Cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    out.requires_grad = requires_grad;
    return out;
  }
};

}  // namespace protoaudio::diff

#endif  // PROTOAUDIO_DIFF_TENSOR_HPP_
