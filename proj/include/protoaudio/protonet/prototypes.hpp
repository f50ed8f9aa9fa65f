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

#ifndef PROTOAUDIO_PROTONET_PROTOTYPES_HPP_
#define PROTOAUDIO_PROTONET_PROTOTYPES_HPP_

#include <cstddef>
#include <vector>

#include "protoaudio/diff/tape.hpp"
#include "protoaudio/diff/tensor.hpp"

namespace protoaudio::protonet {

// support: [k, n, d] -> [k, d] per-class means.
diff::Tensor<double> ComputePrototypes(const diff::Tensor<double>& support);

// softmax_j(-||query - prototype_j||^2). prototypes: [k, d].
std::vector<double> Classify(const std::vector<double>& query,
                             const diff::Tensor<double>& prototypes);

// Index of the largest entry; ties go to the lowest index.
std::size_t ArgmaxLowest(const std::vector<double>& v);

struct EpisodeScore {
  double loss = 0.0;      // mean -log p(true class)
  double accuracy = 0.0;  // fraction of argmax-correct queries
};

// queries: [m, d]; labels[i] in [0, k).
EpisodeScore ScoreQueries(const diff::Tensor<double>& queries,
                          const diff::Tensor<double>& prototypes,
                          const std::vector<std::size_t>& labels);

// Differentiable episode loss. embeddings: [k*n + k*q, d] in Episode::ClipOrder
// order. Prototypes come from a constant averaging matrix times the support rows.
template <typename T>
diff::Var<T> EpisodeLoss(const diff::Var<T>& embeddings, std::size_t k_way, std::size_t n_shot,
                         std::size_t q_query, double* accuracy = nullptr);

}  // namespace protoaudio::protonet

#endif  // PROTOAUDIO_PROTONET_PROTOTYPES_HPP_
