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

#include "protoaudio/dsp_frontend.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "protoaudio/error.hpp"

namespace protoaudio {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void PutU32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

}  // namespace

void FrontendConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kConfig, what); };
  if (frame_len_samples < 1) fail("frame_len_samples must be positive");
  if (frame_len_samples > fft_size) fail("frame_len_samples exceeds fft_size");
  if (hop_samples < 1) fail("hop_samples must be >= 1");
  if (n_mels < 2) fail("n_mels must be >= 2");
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) fail("fft_size must be a power of two");
  if (!(fmin_hz >= 0.0 && fmin_hz < fmax_hz && fmax_hz <= sample_rate_hz / 2.0)) {
    fail("need 0 <= fmin_hz < fmax_hz <= sample_rate/2");
  }
  if (!(log_floor > 0.0)) fail("log_floor must be positive");
}

double HzToMel(double f_hz) {
  if (f_hz < 0.0 || std::isnan(f_hz)) {
    throw Error(ErrorKind::kDomain, "mel scale undefined for " + std::to_string(f_hz) + " Hz");
  }
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double MelToHz(double mel) {
  if (mel < 0.0 || std::isnan(mel)) {
    throw Error(ErrorKind::kDomain, "negative mel value " + std::to_string(mel));
  }
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

double HammingWeight(std::size_t i, std::size_t length) {
  if (length <= 1) return 1.0;
  return 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(length - 1));
}

std::vector<double> HammingWindow(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t i = 0; i < length; ++i) w[i] = HammingWeight(i, length);
  return w;
}

std::size_t FrameCount(std::size_t num_samples, const FrontendConfig& cfg) {
  const auto len = static_cast<std::size_t>(cfg.frame_len_samples);
  const auto hop = static_cast<std::size_t>(cfg.hop_samples);
  if (num_samples < len) return 1;
  return (num_samples - len) / hop + 1;
}

Matrix FrameSignal(const Waveform& w, const FrontendConfig& cfg) {
  cfg.Validate();
  const auto len = static_cast<std::size_t>(cfg.frame_len_samples);
  const auto hop = static_cast<std::size_t>(cfg.hop_samples);
  const std::vector<double> window = HammingWindow(len);

  Matrix frames;
  frames.rows = FrameCount(w.size(), cfg);
  frames.cols = len;
  frames.values.assign(frames.rows * len, 0.0);
  for (std::size_t f = 0; f < frames.rows; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < len && start + i < w.size(); ++i) {
      frames.at(f, i) = static_cast<double>(w.samples[start + i]) * window[i];
    }
  }
  return frames;
}

namespace {

std::vector<double> PowerSpectrumWith(Eigen::FFT<double>& fft,
                                      const std::vector<double>& frame, int fft_size) {
  std::vector<double> padded(static_cast<std::size_t>(fft_size), 0.0);
  std::copy_n(frame.begin(), std::min(frame.size(), padded.size()), padded.begin());
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  const std::size_t bins = static_cast<std::size_t>(fft_size) / 2 + 1;
  std::vector<double> power(bins);
  for (std::size_t k = 0; k < bins; ++k) power[k] = std::norm(spectrum[k]) / fft_size;
  return power;
}

}  // namespace

std::vector<double> PowerSpectrum(const std::vector<double>& frame, int fft_size) {
  Eigen::FFT<double> fft;
  return PowerSpectrumWith(fft, frame, fft_size);
}

std::vector<double> MelBreakpointsHz(const FrontendConfig& cfg) {
  cfg.Validate();
  const double lo = HzToMel(cfg.fmin_hz);
  const double hi = HzToMel(cfg.fmax_hz);
  const int count = cfg.n_mels + 2;
  std::vector<double> hz(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    hz[static_cast<std::size_t>(i)] = MelToHz(lo + (hi - lo) * i / (count - 1));
  }
  // Pin the ends so the round trip does not wander outside [fmin, fmax].
  hz.front() = cfg.fmin_hz;
  hz.back() = cfg.fmax_hz;
  return hz;
}

Matrix BuildMelFilterbank(const FrontendConfig& cfg) {
  const std::vector<double> edges = MelBreakpointsHz(cfg);
  const std::size_t bins = static_cast<std::size_t>(cfg.fft_size) / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate_hz) / cfg.fft_size;

  Matrix fb;
  fb.rows = static_cast<std::size_t>(cfg.n_mels);
  fb.cols = bins;
  fb.values.assign(fb.rows * bins, 0.0);
  for (std::size_t m = 0; m < fb.rows; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      const double rise = (f - left) / (center - left);
      const double fall = (right - f) / (right - center);
      const double weight = std::max(0.0, std::min(rise, fall));
      fb.at(m, k) = weight;
      any = any || weight > 0.0;
    }
    if (!any) {
      throw Error(ErrorKind::kConfig,
                  "mel filter " + std::to_string(m) + " covers no FFT bin; fft_size " +
                      std::to_string(cfg.fft_size) + " too small for n_mels " +
                      std::to_string(cfg.n_mels));
    }
  }
  return fb;
}

LogMelExtractor::LogMelExtractor(FrontendConfig cfg)
    : cfg_(cfg), filterbank_(BuildMelFilterbank(cfg_)) {}

FeatureMatrix LogMelExtractor::Extract(const Waveform& w) const {
  const Matrix frames = FrameSignal(w, cfg_);
  FeatureMatrix out;
  out.frames = frames.rows;
  out.n_mels = filterbank_.rows;
  out.values.resize(out.frames * out.n_mels);

  std::vector<double> frame(frames.cols);
  Eigen::FFT<double> fft;
  for (std::size_t t = 0; t < frames.rows; ++t) {
    std::copy_n(frames.values.begin() + static_cast<std::ptrdiff_t>(t * frames.cols),
                frames.cols, frame.begin());
    const std::vector<double> power = PowerSpectrumWith(fft, frame, cfg_.fft_size);
    for (std::size_t m = 0; m < filterbank_.rows; ++m) {
      double energy = 0.0;
      for (std::size_t k = 0; k < filterbank_.cols; ++k) {
        energy += filterbank_.at(m, k) * power[k];
      }
      out.at(t, m) = static_cast<float>(std::log(energy + cfg_.log_floor));
    }
  }
  return out;
}

FeatureMatrix ExtractFeatures(const Waveform& w, const FrontendConfig& cfg) {
  return LogMelExtractor(cfg).Extract(w);
}

void WriteFeatureDump(const std::string& path, const FeatureMatrix& features) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  out.write("LMEL", 4);
  PutU32(out, 1);
  PutU32(out, static_cast<std::uint32_t>(features.frames));
  PutU32(out, static_cast<std::uint32_t>(features.n_mels));
  out.write(reinterpret_cast<const char*>(features.values.data()),
            static_cast<std::streamsize>(features.values.size() * sizeof(float)));
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path);
}

FeatureMatrix ReadFeatureDump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, path);
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, "LMEL", 4) != 0 || header[0] != 1) {
    throw Error(ErrorKind::kCorruptContainer, path + ": bad LMEL header");
  }
  FeatureMatrix f;
  f.frames = header[1];
  f.n_mels = header[2];
  f.values.resize(f.frames * f.n_mels);
  in.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(f.values.size() * sizeof(float)));
  if (!in) throw Error(ErrorKind::kCorruptContainer, path + ": truncated LMEL payload");
  return f;
}

}  // namespace protoaudio
