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

// Log-mel filterbank frontend: hamming-windowed 25 ms frames every 10 ms,
// 512-point power spectrum, 64 HTK-mel triangles, natural log with a floor.

#ifndef PROTOAUDIO_DSP_FRONTEND_HPP_
#define PROTOAUDIO_DSP_FRONTEND_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "protoaudio/audio_io.hpp"

namespace protoaudio {

struct FrontendConfig {
  int frame_len_samples = 400;
  int hop_samples = 160;
  int fft_size = 512;
  int n_mels = 64;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-6;
  int sample_rate_hz = kSampleRateHz;

  // Throws ConfigError when an invariant is violated.
  void Validate() const;
};

// Row-major frames x n_mels log-mel values.
struct FeatureMatrix {
  std::vector<float> values;
  std::size_t frames = 0;
  std::size_t n_mels = 0;

  float at(std::size_t t, std::size_t m) const { return values[t * n_mels + m]; }
  float& at(std::size_t t, std::size_t m) { return values[t * n_mels + m]; }
};

// Dense row-major matrix of doubles; used for frames and the filterbank.
struct Matrix {
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
};

// HTK mel scale. MelToHz is the exact inverse.
double HzToMel(double f_hz);
double MelToHz(double mel);

double HammingWeight(std::size_t i, std::size_t length);
std::vector<double> HammingWindow(std::size_t length);

std::size_t FrameCount(std::size_t num_samples, const FrontendConfig& cfg);

// Windowed frames (rows) of frame_len_samples each. Inputs shorter than one
// frame are zero-padded to exactly one frame.
Matrix FrameSignal(const Waveform& w, const FrontendConfig& cfg);

// One-sided power spectrum |X_k|^2 / fft_size for k in [0, fft_size/2].
// With this normalization P_0 + 2*sum(P_1..P_{N/2-1}) + P_{N/2} equals the
// energy of the (zero-padded) frame.
std::vector<double> PowerSpectrum(const std::vector<double>& frame, int fft_size);

// Center frequency of every mel triangle breakpoint (n_mels + 2 values).
std::vector<double> MelBreakpointsHz(const FrontendConfig& cfg);

// n_mels x (fft_size/2 + 1) triangular filters, peak weight 1.
Matrix BuildMelFilterbank(const FrontendConfig& cfg);

// Precomputed filterbank and window; cheap to share read-only across threads.
class LogMelExtractor {
 public:
  explicit LogMelExtractor(FrontendConfig cfg = {});

  FeatureMatrix Extract(const Waveform& w) const;
  const FrontendConfig& config() const { return cfg_; }
  const Matrix& filterbank() const { return filterbank_; }

 private:
  FrontendConfig cfg_;
  Matrix filterbank_;
};

FeatureMatrix ExtractFeatures(const Waveform& w, const FrontendConfig& cfg = {});

// Feature dump: 16-byte header ("LMEL", u32 version=1, u32 frames,
// u32 n_mels) followed by little-endian float32 values, row-major.
void WriteFeatureDump(const std::string& path, const FeatureMatrix& features);
FeatureMatrix ReadFeatureDump(const std::string& path);

}  // namespace protoaudio

#endif  // PROTOAUDIO_DSP_FRONTEND_HPP_
