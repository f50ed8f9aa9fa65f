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

// Learnable band-pass sinc filters. Each filter is parameterized by two reals
// in Hz; the effective cutoffs are
//
//   f1 = min(|theta_low|, nyquist - min_band)
//   f2 = min(f1 + max(|theta_band|, min_band), nyquist)
//
// so 0 <= f1 < f2 <= nyquist holds for any parameter values.

#ifndef PROTOAUDIO_ENCODERS_SINC_HPP_
#define PROTOAUDIO_ENCODERS_SINC_HPP_

#include <cstddef>
#include <vector>

#include "protoaudio/diff/tape.hpp"

namespace protoaudio::encoders {

inline constexpr double kSincMinBandHz = 1.0;
inline constexpr double kSincInitLowHz = 30.0;
inline constexpr double kSincInitTopMarginHz = 100.0;

struct SincLayerParams {
  std::vector<double> theta_low;
  std::vector<double> theta_band;
  std::size_t kernel_len = 251;
  double sample_rate_hz = 16000.0;

  std::size_t n_filters() const { return theta_low.size(); }
};

struct SincCutoffs {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
};

SincCutoffs EffectiveCutoffs(double theta_low, double theta_band, double sample_rate_hz);

// n_filters bands on consecutive mel-spaced breakpoints from 30 Hz to
// nyquist - 100 Hz; band i ends where band i + 1 starts.
SincLayerParams SincInitMel(std::size_t n_filters, double sample_rate_hz,
                            std::size_t kernel_len = 251);

// Mel-scale midpoint of a band, in Hz.
double SincBandCenterHz(const SincCutoffs& c);

// Hamming-windowed band-pass taps for one filter, n centered on kernel_len/2:
// g[n] = 2 f2 sinc(2 pi f2 n) - 2 f1 sinc(2 pi f1 n), frequencies normalized
// by the sample rate.
std::vector<double> SincKernel(const SincCutoffs& c, std::size_t kernel_len,
                               double sample_rate_hz);

// Differentiable filter bank: theta_low, theta_band [F] -> weights [F, 1, K],
// ready for Conv1d. kernel_len must be odd.
template <typename T>
diff::Var<T> SincFilterBank(const diff::Var<T>& theta_low, const diff::Var<T>& theta_band,
                            std::size_t kernel_len, double sample_rate_hz);

}  // namespace protoaudio::encoders

#endif  // PROTOAUDIO_ENCODERS_SINC_HPP_
