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

// Split files list one class-id per line under [train], [val] and [test]
// section markers, after a provenance comment:
//
//   # seed=7 ratios=0.6,0.2,0.2 min_per_class=10
//   [train]
//   speaker_03
//   ...

#ifndef PROTOAUDIO_DATASETKIT_SPLITS_HPP_
#define PROTOAUDIO_DATASETKIT_SPLITS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "protoaudio/datasetkit/manifest.hpp"

namespace protoaudio::datasetkit {

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct FewShotSplit {
  std::vector<std::string> train_classes;
  std::vector<std::string> val_classes;
  std::vector<std::string> test_classes;
  // Classes excluded for having fewer than min_per_class clips.
  std::vector<std::string> dropped;
  std::uint64_t seed = 0;
  SplitRatios ratios;
  std::size_t min_per_class = 0;
};

// Shuffles the qualifying classes with `seed` and cuts them by `ratios`
// using largest-remainder rounding. Every split must receive a class.
FewShotSplit MakeSplits(const Manifest& m, const SplitRatios& ratios, std::size_t min_per_class,
                        std::uint64_t seed);

// Largest-remainder apportionment of `total` items; ties favour earlier parts.
std::vector<std::size_t> Apportion(std::size_t total, const std::vector<double>& ratios);

SplitRatios ParseRatios(const std::string& text);
std::string FormatRatios(const SplitRatios& r);

void WriteSplitFile(const std::string& path, const FewShotSplit& split);
FewShotSplit ReadSplitFile(const std::string& path);

}  // namespace protoaudio::datasetkit

#endif  // PROTOAUDIO_DATASETKIT_SPLITS_HPP_
