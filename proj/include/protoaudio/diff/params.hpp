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

#ifndef PROTOAUDIO_DIFF_PARAMS_HPP_
#define PROTOAUDIO_DIFF_PARAMS_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "protoaudio/diff/tape.hpp"
#include "protoaudio/diff/tensor.hpp"

namespace protoaudio::diff {

// Ordered, named collection of learnable tensors.
class ParameterSet {
 public:
  Tensor<float>& Add(const std::string& name, Tensor<float> value);

  std::size_t size() const { return values_.size(); }
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor<float>& operator[](std::size_t i) { return values_[i]; }
  const Tensor<float>& operator[](std::size_t i) const { return values_[i]; }
  std::size_t IndexOf(const std::string& name) const;
  Tensor<float>& at(const std::string& name) { return values_[IndexOf(name)]; }
  const Tensor<float>& at(const std::string& name) const { return values_[IndexOf(name)]; }
  std::vector<Tensor<float>>& values() { return values_; }
  const std::vector<Tensor<float>>& values() const { return values_; }
  std::size_t NumScalars() const;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor<float>> values_;
};

// Leaf handles for one forward pass, index-aligned with a ParameterSet.
template <typename T>
std::vector<Var<T>> BindParameters(Tape<T>& tape, const ParameterSet& params,
                                   bool requires_grad) {
  std::vector<Var<T>> vars;
  vars.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    vars.push_back(tape.Leaf(params[i].Cast<T>(), requires_grad));
  }
  return vars;
}

template <typename T>
std::vector<Tensor<float>> CollectGradients(const Gradients<T>& grads,
                                            const std::vector<Var<T>>& vars) {
  std::vector<Tensor<float>> out;
  out.reserve(vars.size());
  for (const Var<T>& v : vars) out.push_back(grads[v].template Cast<float>());
  return out;
}

// Kaiming-uniform: U(-b, b) with b = sqrt(6 / fan_in).
Tensor<float> KaimingUniform(Shape shape, std::size_t fan_in, std::mt19937_64& rng);
// U(-bound, bound).
Tensor<float> ScaledUniform(Shape shape, double bound, std::mt19937_64& rng);

struct AdamConfig {
  double lr = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Tensor<float>> m;
  std::vector<Tensor<float>> v;
  std::int64_t step = 0;
};

// One bias-corrected Adam update. Fresh (empty) state is sized on first use.
void AdamStep(std::vector<Tensor<float>>& params, const std::vector<Tensor<float>>& grads,
              AdamState& state, const AdamConfig& cfg);

}  // namespace protoaudio::diff

#endif  // PROTOAUDIO_DIFF_PARAMS_HPP_
