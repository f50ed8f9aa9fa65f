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

#ifndef PROTOAUDIO_PROTONET_EVALUATE_HPP_
#define PROTOAUDIO_PROTONET_EVALUATE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "protoaudio/diff/tensor.hpp"
#include "protoaudio/encoders/encoder.hpp"
#include "protoaudio/protonet/episode.hpp"

namespace protoaudio::protonet {

inline constexpr std::size_t kDefaultTestEpisodes = 1000;

// Maps every clip of a split to an embedding row. Evaluation embeds each clip
// once and then scores episodes on the cached rows.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::string name() const = 0;
  // [split.size(), dim]
  virtual diff::Tensor<double> EmbedSplit(const SplitData& split) const = 0;
};

class EncoderEmbedder : public Embedder {
 public:
  explicit EncoderEmbedder(const encoders::Encoder& encoder) : encoder_(encoder) {}
  std::string name() const override;
  diff::Tensor<double> EmbedSplit(const SplitData& split) const override;

 private:
  const encoders::Encoder& encoder_;
};

// One-hot of the clip's class: a perfect embedding, used as a fixture.
class OracleEmbedder : public Embedder {
 public:
  std::string name() const override { return "oracle"; }
  diff::Tensor<double> EmbedSplit(const SplitData& split) const override;
};

// Every clip maps to the same vector: chance-level fixture.
class ConstantEmbedder : public Embedder {
 public:
  std::string name() const override { return "constant"; }
  diff::Tensor<double> EmbedSplit(const SplitData& split) const override;
};

struct EvalConfig {
  std::size_t n_shot = 5;
  std::size_t k_way = 5;
  std::size_t q_query = 5;
  std::size_t episodes = kDefaultTestEpisodes;
  std::uint64_t seed = 0;
};

struct EvalReport {
  std::string embedder;
  EvalConfig config;
  double mean_accuracy = 0.0;
  double std_error = 0.0;  // sample std / sqrt(episodes)
  double ci95_low = 0.0;   // mean -/+ 1.96 std_error
  double ci95_high = 0.0;
  double mean_loss = 0.0;
  std::vector<double> episode_accuracy;
};

// Scores cfg.episodes episodes drawn from one seeded stream.
EvalReport EvaluateEmbeddings(const diff::Tensor<double>& embeddings, const SplitData& split,
                              const EvalConfig& cfg);
EvalReport Evaluate(const Embedder& embedder, const SplitData& split, const EvalConfig& cfg);

}  // namespace protoaudio::protonet

#endif  // PROTOAUDIO_PROTONET_EVALUATE_HPP_
