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

#ifndef PROTOAUDIO_AUDIO_IO_HPP_
#define PROTOAUDIO_AUDIO_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace protoaudio {

inline constexpr int kSampleRateHz = 16000;

// Mono audio at the canonical 16 kHz rate. Samples lie in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int sample_rate_hz = kSampleRateHz;

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws InvalidProfile when empty, non-finite, out of range or wrong rate.
void ValidateWaveform(const Waveform& w);

// Harmonic timbre used by the synthetic corpus generator. Partial i (0-based)
// sits at fundamental_hz * (i + 1) with amplitude harmonic_amps[i].
struct TimbreProfile {
  double fundamental_hz = 440.0;
  std::vector<double> harmonic_amps = {1.0};
  double noise_floor = 0.0;
};

void ValidateProfile(const TimbreProfile& profile);

// Reads a RIFF/WAVE file. Only PCM16 mono 16 kHz is accepted; anything else
// is rejected rather than converted. Samples are scaled by 1/32768.
Waveform LoadWav(const std::string& path);

// Writes PCM16 mono. Samples are scaled by 32768, rounded and clipped to the
// int16 range, so LoadWav(WriteWav(x)) is exact for values k/32768.
void WriteWav(const std::string& path, const Waveform& w);

// Sum of harmonic partials plus uniform noise, peak-normalized to 0.9.
// Deterministic given (profile, duration_s, seed).
Waveform SynthClip(const TimbreProfile& profile, double duration_s,
                   std::uint64_t seed);

}  // namespace protoaudio

#endif  // PROTOAUDIO_AUDIO_IO_HPP_
