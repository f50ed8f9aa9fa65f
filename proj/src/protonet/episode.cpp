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

#include "protoaudio/protonet/episode.hpp"

#include <numeric>

#include "protoaudio/error.hpp"

namespace protoaudio::protonet {
namespace {

// First `count` entries of a partial Fisher-Yates shuffle of `items`.
std::vector<std::size_t> DrawWithoutReplacement(std::vector<std::size_t> items,
                                                std::size_t count, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, items.size() - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(count);
  return items;
}

}  // namespace

std::vector<std::size_t> Episode::ClipOrder() const {
  std::vector<std::size_t> order;
  for (const auto& s : support) order.insert(order.end(), s.begin(), s.end());
  for (const auto& q : query) order.insert(order.end(), q.begin(), q.end());
  return order;
}

std::vector<std::size_t> Episode::QueryLabels() const {
  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < query.size(); ++c) labels.insert(labels.end(), query[c].size(), c);
  return labels;
}

Episode SampleEpisode(const ClassPool& pool, std::size_t n_shot, std::size_t k_way,
                      std::size_t q_query, std::mt19937_64& rng) {
  if (n_shot == 0 || k_way == 0 || q_query == 0) {
    throw Error(ErrorKind::kConfig, "episode shape needs n, k, q >= 1");
  }
  if (pool.num_classes() < k_way) {
    throw Error(ErrorKind::kInsufficientClasses,
                std::to_string(k_way) + "-way episode from a split with " +
                    std::to_string(pool.num_classes()) + " classes");
  }
  for (std::size_t c = 0; c < pool.num_classes(); ++c) {
    if (pool.members[c].size() < n_shot + q_query) {
      throw Error(ErrorKind::kInsufficientExamples,
                  "class '" + pool.class_ids[c] + "' has " +
                      std::to_string(pool.members[c].size()) + " clips, episode needs " +
                      std::to_string(n_shot + q_query));
    }
  }

  std::vector<std::size_t> all(pool.num_classes());
  std::iota(all.begin(), all.end(), 0);
  Episode ep;
  ep.classes = DrawWithoutReplacement(std::move(all), k_way, rng);
  for (std::size_t c : ep.classes) {
    auto picked = DrawWithoutReplacement(pool.members[c], n_shot + q_query, rng);
    ep.support.emplace_back(picked.begin(), picked.begin() + n_shot);
    ep.query.emplace_back(picked.begin() + n_shot, picked.end());
  }
  return ep;
}

}  // namespace protoaudio::protonet
