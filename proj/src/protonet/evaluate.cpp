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

#include "protoaudio/protonet/evaluate.hpp"

#include <cmath>
#include <random>

#include "protoaudio/error.hpp"
#include "protoaudio/protonet/prototypes.hpp"

namespace protoaudio::protonet {

std::string EncoderEmbedder::name() const {
  return encoders::EncoderKindName(encoder_.spec().kind);
}

diff::Tensor<double> EncoderEmbedder::EmbedSplit(const SplitData& split) const {
  std::vector<const encoders::ClipData*> clips;
  clips.reserve(split.size());
  for (const auto& c : split.clips) clips.push_back(&c);
  return encoder_.Embed(clips).Cast<double>();
}

diff::Tensor<double> OracleEmbedder::EmbedSplit(const SplitData& split) const {
  const std::size_t k = split.pool.num_classes();
  diff::Tensor<double> out({split.size(), k});
  for (std::size_t i = 0; i < split.size(); ++i) out.data[i * k + split.labels[i]] = 1.0;
  return out;
}

diff::Tensor<double> ConstantEmbedder::EmbedSplit(const SplitData& split) const {
  return diff::Tensor<double>({split.size(), 4}, 0.5);
}

EvalReport EvaluateEmbeddings(const diff::Tensor<double>& embeddings, const SplitData& split,
                              const EvalConfig& cfg) {
  if (cfg.episodes == 0) throw Error(ErrorKind::kConfig, "evaluation needs >= 1 episode");
  if (embeddings.rank() != 2 || embeddings.dim(0) != split.size()) {
    throw Error(ErrorKind::kShapeMismatch, "embeddings " + diff::ShapeString(embeddings.shape) +
                                               " for a split of " +
                                               std::to_string(split.size()) + " clips");
  }
  const std::size_t d = embeddings.dim(1);
  auto row = [&](std::size_t clip, double* dst) {
    std::copy_n(embeddings.data.begin() + clip * d, d, dst);
  };

  EvalReport report;
  report.config = cfg;
  std::mt19937_64 rng(cfg.seed);
  for (std::size_t e = 0; e < cfg.episodes; ++e) {
    const Episode ep = SampleEpisode(split.pool, cfg.n_shot, cfg.k_way, cfg.q_query, rng);
    diff::Tensor<double> support({cfg.k_way, cfg.n_shot, d});
    diff::Tensor<double> queries({cfg.k_way * cfg.q_query, d});
    for (std::size_t c = 0; c < cfg.k_way; ++c) {
      for (std::size_t s = 0; s < cfg.n_shot; ++s) {
        row(ep.support[c][s], support.data.data() + (c * cfg.n_shot + s) * d);
      }
      for (std::size_t q = 0; q < cfg.q_query; ++q) {
        row(ep.query[c][q], queries.data.data() + (c * cfg.q_query + q) * d);
      }
    }
    const EpisodeScore s = ScoreQueries(queries, ComputePrototypes(support), ep.QueryLabels());
    report.episode_accuracy.push_back(s.accuracy);
    report.mean_loss += s.loss;
  }

  const double n = static_cast<double>(cfg.episodes);
  double sum = 0.0;
  for (double a : report.episode_accuracy) sum += a;
  report.mean_accuracy = sum / n;
  report.mean_loss /= n;
  double ss = 0.0;
  for (double a : report.episode_accuracy) ss += (a - report.mean_accuracy) * (a - report.mean_accuracy);
  const double var = cfg.episodes > 1 ? ss / (n - 1.0) : 0.0;
  report.std_error = std::sqrt(var / n);
  report.ci95_low = report.mean_accuracy - 1.96 * report.std_error;
  report.ci95_high = report.mean_accuracy + 1.96 * report.std_error;
  return report;
}

EvalReport Evaluate(const Embedder& embedder, const SplitData& split, const EvalConfig& cfg) {
  EvalReport r = EvaluateEmbeddings(embedder.EmbedSplit(split), split, cfg);
  r.embedder = embedder.name();
  return r;
}

}  // namespace protoaudio::protonet
