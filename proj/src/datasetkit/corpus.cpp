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

#include "protoaudio/datasetkit/corpus.hpp"

#include <unordered_map>

#include "protoaudio/error.hpp"

namespace protoaudio::datasetkit {

protonet::SplitData LoadSplitData(const Manifest& m, const std::vector<std::string>& classes,
                                  const LoadOptions& opts) {
  if (!m.single_label()) throw Error(ErrorKind::kConfig, "split loading needs a single-label manifest");
  protonet::SplitData split;
  std::unordered_map<std::string, std::size_t> slot;
  for (const auto& id : classes) {
    if (!m.class_index.contains(id)) {
      throw Error(ErrorKind::kConfig, "class '" + id + "' is not in the manifest");
    }
    slot.emplace(id, split.pool.class_ids.size());
    split.pool.class_ids.push_back(id);
  }
  split.pool.members.resize(classes.size());

  const LogMelExtractor extractor(opts.frontend);
  for (const auto& e : m.entries) {
    auto it = slot.find(e.labels[0]);
    if (it == slot.end()) continue;
    encoders::ClipData clip;
    if (opts.compute_features || opts.keep_waveform) {
      Waveform w = LoadWav(m.ResolvePath(e));
      if (opts.compute_features) clip.features = extractor.Extract(w);
      if (opts.keep_waveform) clip.waveform = std::move(w);
    }
    split.pool.members[it->second].push_back(split.clips.size());
    split.labels.push_back(it->second);
    split.paths.push_back(e.path);
    split.clips.push_back(std::move(clip));
  }
  return split;
}

}  // namespace protoaudio::datasetkit
