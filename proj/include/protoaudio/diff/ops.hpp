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

// Differentiable operators. Instantiated for float (training) and double
// (gradient checking). Shapes must match exactly; the only broadcast is
// AddBias over the last axis and the per-channel bias inside convolutions.

#ifndef PROTOAUDIO_DIFF_OPS_HPP_
#define PROTOAUDIO_DIFF_OPS_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "protoaudio/diff/tape.hpp"

namespace protoaudio::diff {

template <typename T> Var<T> Add(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Sub(const Var<T>& a, const Var<T>& b);
template <typename T> Var<T> Mul(const Var<T>& a, const Var<T>& b);

// x: [..., n], bias: [n].
template <typename T> Var<T> AddBias(const Var<T>& x, const Var<T>& bias);

template <typename T> Var<T> Scale(const Var<T>& a, T s);
template <typename T> Var<T> AddScalar(const Var<T>& a, T s);

template <typename T> Var<T> Relu(const Var<T>& a);
template <typename T> Var<T> Sigmoid(const Var<T>& a);
template <typename T> Var<T> Tanh(const Var<T>& a);
template <typename T> Var<T> Abs(const Var<T>& a);
// Natural log; inputs must be strictly positive.
template <typename T> Var<T> Log(const Var<T>& a);

// Sum of all entries, shape {1}.
template <typename T> Var<T> Sum(const Var<T>& a);
// Mean over one axis; the axis is removed (a rank-1 input yields {1}).
template <typename T> Var<T> Mean(const Var<T>& a, std::size_t axis);

// a: [m, k], b: [k, n] -> [m, n].
template <typename T> Var<T> MatMul(const Var<T>& a, const Var<T>& b);
// [m, n] -> [n, m].
template <typename T> Var<T> Transpose(const Var<T>& a);
template <typename T> Var<T> Reshape(const Var<T>& a, Shape shape);
// Entries [start, start + length) along `axis`.
template <typename T>
Var<T> Slice(const Var<T>& a, std::size_t axis, std::size_t start, std::size_t length);
template <typename T> Var<T> Concat(const std::vector<Var<T>>& parts, std::size_t axis);

// x: [N, C, L], w: [O, C, K], bias: [O] -> [N, O, (L + 2p - K) / stride + 1].
template <typename T>
Var<T> Conv1d(const Var<T>& x, const Var<T>& w, const std::optional<Var<T>>& bias,
              std::size_t stride, std::size_t padding);

// x: [N, C, H, W], w: [O, C, KH, KW], bias: [O]; same stride/padding on both axes.
template <typename T>
Var<T> Conv2d(const Var<T>& x, const Var<T>& w, const std::optional<Var<T>>& bias,
              std::size_t stride, std::size_t padding);

// x: [N, C, H, W]; windows that would run past the edge are dropped.
template <typename T>
Var<T> MaxPool2d(const Var<T>& x, std::size_t kernel_h, std::size_t kernel_w,
                 std::size_t stride_h, std::size_t stride_w);

// Softmax over the last axis, shifted by the row max.
template <typename T> Var<T> Softmax(const Var<T>& a);

// a: [m, d], b: [n, d] -> [m, n] with entry ||a_i - b_j||^2.
template <typename T> Var<T> SquaredEuclidean(const Var<T>& a, const Var<T>& b);

// logits: [m, k]; mean over rows of -log softmax(logits)[row, label[row]].
template <typename T>
Var<T> CrossEntropy(const Var<T>& logits, const std::vector<std::size_t>& labels);

}  // namespace protoaudio::diff

#endif  // PROTOAUDIO_DIFF_OPS_HPP_
