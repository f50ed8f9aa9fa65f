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

// Synthetic timbre corpus: each class is a harmonic TimbreProfile, each clip a
// jittered rendering of it.

#ifndef PROTOAUDIO_DATASETKIT_SYNTHETIC_HPP_
#define PROTOAUDIO_DATASETKIT_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "protoaudio/audio_io.hpp"
#include "protoaudio/datasetkit/manifest.hpp"

namespace protoaudio::datasetkit {

struct SyntheticJitter {
  double min_duration_s = 0.8;
  double max_duration_s = 1.2;
  double pitch = 0.06;          // relative, uniform +-
  double harmonic_amp = 0.3;    // relative, uniform +- per partial
  double min_gain = 0.005;      // output peak scale after normalization
  double max_gain = 1.0;
  double noise_scale_lo = 0.5;  // noise floor multiplier
  double noise_scale_hi = 8.0;
};

// One profile per class. Fundamentals sit on distinct slots of a 40 Hz grid
// in [80, 2000] Hz; harmonic envelopes are drawn independently per class.
std::vector<TimbreProfile> SyntheticProfiles(std::size_t n_classes, std::uint64_t seed);

// A jittered clip of `profile`. Deterministic in (profile, seed, jitter).
Waveform SyntheticClip(const TimbreProfile& profile, std::uint64_t seed,
                       const SyntheticJitter& jitter = {});

std::string SyntheticClassId(std::size_t c);

// Writes <out_dir>/<class-id>/clip_NNN.wav and <out_dir>/manifest.tsv.
Manifest GenSyntheticCorpus(const std::string& out_dir, std::size_t n_classes,
                            std::size_t clips_per_class, std::uint64_t seed,
                            const SyntheticJitter& jitter = {});

}  // namespace protoaudio::datasetkit

#endif  // PROTOAUDIO_DATASETKIT_SYNTHETIC_HPP_
