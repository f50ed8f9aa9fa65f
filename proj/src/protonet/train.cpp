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

#include "protoaudio/protonet/train.hpp"

#include <cmath>
#include <random>

#include "protoaudio/error.hpp"
#include "protoaudio/protonet/evaluate.hpp"
#include "protoaudio/protonet/prototypes.hpp"

namespace protoaudio::protonet {
namespace {

// Validation episodes come from their own stream so they do not depend on
// how many training episodes have been drawn.
constexpr std::uint64_t kValidationSeedSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

void TrainConfig::Validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw Error(ErrorKind::kConfig, std::string(name) + " must be positive");
  };
  positive(n_shot, "n_shot");
  positive(k_way, "k_way");
  positive(q_query, "q_query");
  positive(max_episodes, "max_episodes");
  positive(eval_interval, "eval_interval");
  positive(patience_checks, "patience_checks");
  positive(test_episodes, "test_episodes");
  positive(val_episodes, "val_episodes");
  if (!(lr > 0.0) || !std::isfinite(lr)) {
    throw Error(ErrorKind::kConfig, "lr must be a positive finite number");
  }
}

TrainResult Train(encoders::Encoder& encoder, const SplitData& train, const SplitData& val,
                  const TrainConfig& cfg, const TrainHooks& hooks) {
  cfg.Validate();
  // Fail before the first step if either split cannot supply an episode.
  auto probe = [&cfg](const SplitData& split, const char* name) {
    std::mt19937_64 rng(0);
    try {
      SampleEpisode(split.pool, cfg.n_shot, cfg.k_way, cfg.q_query, rng);
    } catch (const Error& e) {
      const std::string what = e.what();
      throw Error(e.kind(), std::string(name) + " split: " + what.substr(what.find(": ") + 2));
    }
  };
  probe(train, "training");
  Validator validator = hooks.validator;
  if (!validator) {
    probe(val, "validation");
    validator = [&val, &cfg](const encoders::Encoder& enc) {
      EvalConfig ec{cfg.n_shot, cfg.k_way, cfg.q_query, cfg.val_episodes,
                    cfg.seed ^ kValidationSeedSalt};
      return Evaluate(EncoderEmbedder(enc), val, ec).mean_accuracy;
    };
  }

  TrainResult result;
  result.best_params = encoder.params();
  bool have_incumbent = false;
  std::size_t stale_checks = 0;
  auto check = [&](MetricRecord& rec) {
    const double acc = validator(encoder);
    rec.val_accuracy = acc;
    if (!have_incumbent || acc > result.best_val_accuracy) {
      have_incumbent = true;
      result.best_val_accuracy = acc;
      result.best_episode = rec.episode;
      result.best_params = encoder.params();
      stale_checks = 0;
    } else {
      ++stale_checks;
    }
  };

  std::mt19937_64 rng(cfg.seed);
  diff::AdamState adam;
  diff::AdamConfig adam_cfg;
  adam_cfg.lr = cfg.lr;

  for (std::size_t episode = 1; episode <= cfg.max_episodes; ++episode) {
    const Episode ep = SampleEpisode(train.pool, cfg.n_shot, cfg.k_way, cfg.q_query, rng);
    std::vector<const encoders::ClipData*> clips;
    for (std::size_t i : ep.ClipOrder()) clips.push_back(&train.clips[i]);

    MetricRecord rec;
    rec.episode = episode;
    {
      diff::Tape<float> tape;
      const auto bound = diff::BindParameters<float>(tape, encoder.params(), true);
      const auto emb = encoder.Forward(tape, bound, clips);
      const auto loss = EpisodeLoss(emb, cfg.k_way, cfg.n_shot, cfg.q_query, &rec.accuracy);
      rec.loss = loss.value().item();
      if (!std::isfinite(rec.loss)) {
        throw Error(ErrorKind::kNonFiniteValue,
                    "training loss became non-finite at episode " + std::to_string(episode));
      }
      const auto grads = diff::CollectGradients(tape.Backward(loss), bound);
      diff::AdamStep(encoder.params().values(), grads, adam, adam_cfg);
    }
    result.episodes_run = episode;

    const bool last = episode == cfg.max_episodes;
    if (episode % cfg.eval_interval == 0 || (last && !have_incumbent)) check(rec);
    result.history.push_back(rec);
    if (hooks.on_record) hooks.on_record(rec);
    if (stale_checks >= cfg.patience_checks) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace protoaudio::protonet
