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

#include "protoaudio/diff/params.hpp"

#include <cmath>

namespace protoaudio::diff {

Tensor<float>& ParameterSet::Add(const std::string& name, Tensor<float> value) {
  for (const std::string& existing : names_) {
    if (existing == name) throw Error(ErrorKind::kConfig, "duplicate parameter " + name);
  }
  names_.push_back(name);
  values_.push_back(std::move(value));
  return values_.back();
}

std::size_t ParameterSet::IndexOf(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw Error(ErrorKind::kCheckpointMismatch, "unknown parameter " + name);
}

std::size_t ParameterSet::NumScalars() const {
  std::size_t n = 0;
  for (const auto& v : values_) n += v.size();
  return n;
}

Tensor<float> KaimingUniform(Shape shape, std::size_t fan_in, std::mt19937_64& rng) {
  return ScaledUniform(std::move(shape), std::sqrt(6.0 / static_cast<double>(fan_in)), rng);
}

Tensor<float> ScaledUniform(Shape shape, double bound, std::mt19937_64& rng) {
  Tensor<float> t(std::move(shape));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (float& v : t.data) v = static_cast<float>(dist(rng));
  return t;
}

void AdamStep(std::vector<Tensor<float>>& params, const std::vector<Tensor<float>>& grads,
              AdamState& state, const AdamConfig& cfg) {
  if (grads.size() != params.size()) {
    throw Error(ErrorKind::kShapeMismatch, "adam: " + std::to_string(grads.size()) +
                                               " gradients for " + std::to_string(params.size()) +
                                               " parameters");
  }
  if (state.m.empty()) {
    for (const auto& p : params) {
      state.m.emplace_back(p.shape);
      state.v.emplace_back(p.shape);
    }
  }
  if (state.m.size() != params.size()) {
    throw Error(ErrorKind::kShapeMismatch, "adam: optimizer state does not match parameters");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (grads[i].shape != params[i].shape || state.m[i].shape != params[i].shape) {
      throw Error(ErrorKind::kShapeMismatch, "adam: parameter " + ShapeString(params[i].shape) +
                                                 " vs gradient " + ShapeString(grads[i].shape));
    }
  }

  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = params[i].data;
    auto& m = state.m[i].data;
    auto& v = state.v[i].data;
    const auto& g = grads[i].data;
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j];
      m[j] = static_cast<float>(cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj);
      v[j] = static_cast<float>(cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj);
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] = static_cast<float>(p[j] - cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
    }
  }
}

}  // namespace protoaudio::diff
