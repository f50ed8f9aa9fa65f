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

#ifndef PROTOAUDIO_PROTONET_TRAIN_HPP_
#define PROTOAUDIO_PROTONET_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "protoaudio/diff/params.hpp"
#include "protoaudio/encoders/encoder.hpp"
#include "protoaudio/protonet/episode.hpp"

namespace protoaudio::protonet {

inline constexpr std::size_t kValidationEpisodes = 200;

struct TrainConfig {
  std::size_t n_shot = 5;
  std::size_t k_way = 5;
  std::size_t q_query = 5;
  std::size_t max_episodes = 25000;
  std::size_t eval_interval = 500;
  std::size_t patience_checks = 10;
  double lr = 1e-5;
  std::size_t test_episodes = 1000;
  std::size_t val_episodes = kValidationEpisodes;
  std::uint64_t seed = 0;

  // Throws ConfigError unless every count and the learning rate are positive.
  void Validate() const;
};

struct MetricRecord {
  std::size_t episode = 0;  // 1-based
  double loss = 0.0;
  double accuracy = 0.0;  // query accuracy of this training episode
  std::optional<double> val_accuracy;  // set on validation checks only
};

struct TrainResult {
  diff::ParameterSet best_params;
  double best_val_accuracy = 0.0;
  std::size_t best_episode = 0;
  std::size_t episodes_run = 0;
  bool early_stopped = false;
  std::vector<MetricRecord> history;
};

// Validation accuracy of the encoder's current parameters.
using Validator = std::function<double(const encoders::Encoder&)>;

struct TrainHooks {
  // Defaults to mean accuracy over cfg.val_episodes episodes of the
  // validation split, drawn from the same seed at every check.
  Validator validator;
  std::function<void(const MetricRecord&)> on_record;
};

// Episodic training with Adam. A validation check runs every eval_interval
// episodes; the first check sets the incumbent and only strictly better
// accuracies replace it. Training stops after patience_checks consecutive
// non-improving checks or at max_episodes. The encoder is left holding the
// final parameters; the best ones are returned.
TrainResult Train(encoders::Encoder& encoder, const SplitData& train, const SplitData& val,
                  const TrainConfig& cfg, const TrainHooks& hooks = {});

}  // namespace protoaudio::protonet

#endif  // PROTOAUDIO_PROTONET_TRAIN_HPP_
