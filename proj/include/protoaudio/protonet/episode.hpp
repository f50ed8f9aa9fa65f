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

#ifndef PROTOAUDIO_PROTONET_EPISODE_HPP_
#define PROTOAUDIO_PROTONET_EPISODE_HPP_

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "protoaudio/encoders/encoder.hpp"

namespace protoaudio::protonet {

// Clips of one split grouped by class. members[c] lists indices into the
// split's clip array.
struct ClassPool {
  std::vector<std::string> class_ids;
  std::vector<std::vector<std::size_t>> members;

  std::size_t num_classes() const { return class_ids.size(); }
};

// A loaded split: model inputs plus the class of every clip.
struct SplitData {
  ClassPool pool;
  std::vector<encoders::ClipData> clips;
  std::vector<std::size_t> labels;  // clip -> class index in pool
  std::vector<std::string> paths;

  std::size_t size() const { return clips.size(); }
};

struct Episode {
  std::vector<std::size_t> classes;               // pool class indices, k
  std::vector<std::vector<std::size_t>> support;  // k x n clip indices
  std::vector<std::vector<std::size_t>> query;    // k x q clip indices

  std::size_t k_way() const { return classes.size(); }
  std::size_t n_shot() const { return support.empty() ? 0 : support[0].size(); }
  std::size_t q_query() const { return query.empty() ? 0 : query[0].size(); }

  // All support clips class by class, then all query clips class by class.
  std::vector<std::size_t> ClipOrder() const;
  // Episode-local class (0..k-1) of each query in ClipOrder order.
  std::vector<std::size_t> QueryLabels() const;
};

// k classes uniformly without replacement, then n + q clips per class
// uniformly without replacement; the first n are the support set.
Episode SampleEpisode(const ClassPool& pool, std::size_t n_shot, std::size_t k_way,
                      std::size_t q_query, std::mt19937_64& rng);

}  // namespace protoaudio::protonet

#endif  // PROTOAUDIO_PROTONET_EPISODE_HPP_
