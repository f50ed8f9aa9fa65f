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

#include "protoaudio/protonet/prototypes.hpp"

#include <algorithm>
#include <cmath>

#include "protoaudio/diff/ops.hpp"
#include "protoaudio/error.hpp"

namespace protoaudio::protonet {
namespace {

std::vector<double> NegSquaredDistances(const double* q, const diff::Tensor<double>& protos) {
  const std::size_t k = protos.dim(0), d = protos.dim(1);
  std::vector<double> logits(k);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = q[i] - protos.data[j * d + i];
      s += diff * diff;
    }
    logits[j] = -s;
  }
  return logits;
}

double LogSumExp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

diff::Tensor<double> ComputePrototypes(const diff::Tensor<double>& support) {
  if (support.rank() != 3 || support.dim(1) == 0) {
    throw Error(ErrorKind::kShapeMismatch,
                "prototypes need [k, n, d] support with n >= 1, got " +
                    diff::ShapeString(support.shape));
  }
  const std::size_t k = support.dim(0), n = support.dim(1), d = support.dim(2);
  diff::Tensor<double> out({k, d});
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t s = 0; s < n; ++s) {
      const double* row = support.data.data() + (c * n + s) * d;
      for (std::size_t i = 0; i < d; ++i) out.data[c * d + i] += row[i];
    }
    for (std::size_t i = 0; i < d; ++i) out.data[c * d + i] /= static_cast<double>(n);
  }
  return out;
}

std::vector<double> Classify(const std::vector<double>& query,
                             const diff::Tensor<double>& prototypes) {
  if (prototypes.rank() != 2 || prototypes.dim(1) != query.size() || prototypes.dim(0) == 0) {
    throw Error(ErrorKind::kDimensionMismatch,
                "query of dimension " + std::to_string(query.size()) + " against prototypes " +
                    diff::ShapeString(prototypes.shape));
  }
  std::vector<double> p = NegSquaredDistances(query.data(), prototypes);
  const double lse = LogSumExp(p);
  for (double& x : p) x = std::exp(x - lse);
  return p;
}

std::size_t ArgmaxLowest(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

EpisodeScore ScoreQueries(const diff::Tensor<double>& queries,
                          const diff::Tensor<double>& prototypes,
                          const std::vector<std::size_t>& labels) {
  if (queries.rank() != 2 || prototypes.rank() != 2 || queries.dim(1) != prototypes.dim(1) ||
      labels.size() != queries.dim(0)) {
    throw Error(ErrorKind::kDimensionMismatch,
                "queries " + diff::ShapeString(queries.shape) + " vs prototypes " +
                    diff::ShapeString(prototypes.shape) + " with " +
                    std::to_string(labels.size()) + " labels");
  }
  const std::size_t m = queries.dim(0), d = queries.dim(1);
  EpisodeScore score;
  if (m == 0) return score;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const auto logits = NegSquaredDistances(queries.data.data() + i * d, prototypes);
    score.loss += LogSumExp(logits) - logits[labels[i]];
    correct += ArgmaxLowest(logits) == labels[i];
  }
  score.loss /= static_cast<double>(m);
  score.accuracy = static_cast<double>(correct) / static_cast<double>(m);
  return score;
}

template <typename T>
diff::Var<T> EpisodeLoss(const diff::Var<T>& embeddings, std::size_t k_way, std::size_t n_shot,
                         std::size_t q_query, double* accuracy) {
  const std::size_t n_support = k_way * n_shot, n_query = k_way * q_query;
  if (embeddings.shape().size() != 2 || embeddings.shape()[0] != n_support + n_query) {
    throw Error(ErrorKind::kShapeMismatch,
                "episode embeddings " + diff::ShapeString(embeddings.shape()) + " for " +
                    std::to_string(n_shot) + "-shot " + std::to_string(k_way) + "-way q=" +
                    std::to_string(q_query));
  }
  diff::Tape<T>& tape = embeddings.tape();
  diff::Tensor<T> avg({k_way, n_support});
  for (std::size_t c = 0; c < k_way; ++c) {
    for (std::size_t s = 0; s < n_shot; ++s) {
      avg.data[c * n_support + c * n_shot + s] = T(1) / static_cast<T>(n_shot);
    }
  }
  const auto support = diff::Slice(embeddings, 0, 0, n_support);
  const auto queries = diff::Slice(embeddings, 0, n_support, n_query);
  const auto prototypes = diff::MatMul(tape.Constant(std::move(avg)), support);
  const auto logits = diff::Scale(diff::SquaredEuclidean(queries, prototypes), T(-1));

  std::vector<std::size_t> labels;
  for (std::size_t c = 0; c < k_way; ++c) labels.insert(labels.end(), q_query, c);
  if (accuracy != nullptr) {
    std::size_t correct = 0;
    const auto& lv = logits.value().data;
    for (std::size_t i = 0; i < n_query; ++i) {
      const std::vector<double> row(lv.begin() + i * k_way, lv.begin() + (i + 1) * k_way);
      correct += ArgmaxLowest(row) == labels[i];
    }
    *accuracy = static_cast<double>(correct) / static_cast<double>(n_query);
  }
  return diff::CrossEntropy(logits, labels);
}

template diff::Var<float> EpisodeLoss(const diff::Var<float>&, std::size_t, std::size_t,
                                      std::size_t, double*);
template diff::Var<double> EpisodeLoss(const diff::Var<double>&, std::size_t, std::size_t,
                                       std::size_t, double*);

}  // namespace protoaudio::protonet
