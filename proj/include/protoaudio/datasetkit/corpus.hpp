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

#ifndef PROTOAUDIO_DATASETKIT_CORPUS_HPP_
#define PROTOAUDIO_DATASETKIT_CORPUS_HPP_

#include <string>
#include <vector>

#include "protoaudio/datasetkit/manifest.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/protonet/episode.hpp"

namespace protoaudio::datasetkit {

struct LoadOptions {
  bool keep_waveform = true;
  bool compute_features = true;
  FrontendConfig frontend;
};

// Reads the WAVs of every clip whose (single) label is in `classes`, in
// manifest order, grouping them by class in the order given. With neither
// waveforms nor features requested the files are not opened.
protonet::SplitData LoadSplitData(const Manifest& m, const std::vector<std::string>& classes,
                                  const LoadOptions& opts = {});

}  // namespace protoaudio::datasetkit

#endif  // PROTOAUDIO_DATASETKIT_CORPUS_HPP_
