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

#include "protoaudio/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "protoaudio/error.hpp"

namespace protoaudio {
namespace {

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutU32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutU16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

void ValidateWaveform(const Waveform& w) {
  if (w.sample_rate_hz != kSampleRateHz) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "sample_rate=" + std::to_string(w.sample_rate_hz));
  }
  if (w.samples.empty()) {
    throw Error(ErrorKind::kInvalidProfile, "waveform has no samples");
  }
  for (float s : w.samples) {
    if (!std::isfinite(s) || s < -1.0f || s > 1.0f) {
      throw Error(ErrorKind::kInvalidProfile,
                  "sample outside [-1, 1]: " + std::to_string(s));
    }
  }
}

void ValidateProfile(const TimbreProfile& profile) {
  if (!(profile.fundamental_hz >= 80.0 && profile.fundamental_hz <= 2000.0)) {
    throw Error(ErrorKind::kInvalidProfile,
                "fundamental_hz must lie in [80, 2000], got " +
                    std::to_string(profile.fundamental_hz));
  }
  if (profile.harmonic_amps.empty() || profile.harmonic_amps.size() > 8) {
    throw Error(ErrorKind::kInvalidProfile, "need 1..8 harmonic amplitudes");
  }
  bool any_positive = false;
  for (std::size_t i = 0; i < profile.harmonic_amps.size(); ++i) {
    const double a = profile.harmonic_amps[i];
    if (!std::isfinite(a) || a < 0.0) {
      throw Error(ErrorKind::kInvalidProfile, "negative harmonic amplitude");
    }
    if (a > 0.0) any_positive = true;
    if (profile.fundamental_hz * static_cast<double>(i + 1) >= kSampleRateHz / 2.0) {
      throw Error(ErrorKind::kInvalidProfile,
                  "partial " + std::to_string(i + 1) + " at or above Nyquist");
    }
  }
  if (!any_positive) {
    throw Error(ErrorKind::kInvalidProfile, "all harmonic amplitudes are zero");
  }
  if (!(profile.noise_floor >= 0.0 && profile.noise_floor <= 0.1)) {
    throw Error(ErrorKind::kInvalidProfile, "noise_floor must lie in [0, 0.1]");
  }
}

Waveform LoadWav(const std::string& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorKind::kNotFound, path);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kNotFound, path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error(ErrorKind::kCorruptContainer, path + ": missing RIFF/WAVE header");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_len = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t len = ReadU32(chunk + 4);
    if (pos + 8 + static_cast<std::size_t>(len) > bytes.size()) {
      throw Error(ErrorKind::kCorruptContainer, path + ": truncated chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (len < 16) throw Error(ErrorKind::kCorruptContainer, path + ": short fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible && len >= 40) {
        format = ReadU16(chunk + 8 + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_len = len;
    }
    pos += 8 + len + (len & 1u);
  }
  if (!have_fmt || data == nullptr) {
    throw Error(ErrorKind::kCorruptContainer, path + ": missing fmt or data chunk");
  }
  if (format != kFormatPcm) {
    throw Error(ErrorKind::kUnsupportedFormat, path + ": format=" + std::to_string(format));
  }
  if (channels != 1) {
    throw Error(ErrorKind::kUnsupportedFormat,
                path + ": channels=" + std::to_string(channels));
  }
  if (rate != static_cast<std::uint32_t>(kSampleRateHz)) {
    throw Error(ErrorKind::kUnsupportedFormat,
                path + ": sample_rate=" + std::to_string(rate));
  }
  if (bits != 16) {
    throw Error(ErrorKind::kUnsupportedFormat,
                path + ": bits_per_sample=" + std::to_string(bits));
  }
  if (data_len % 2 != 0) {
    throw Error(ErrorKind::kCorruptContainer, path + ": odd PCM16 data length");
  }

  Waveform w;
  w.samples.resize(data_len / 2);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto v = static_cast<std::int16_t>(ReadU16(data + 2 * i));
    w.samples[i] = static_cast<float>(v) / 32768.0f;
  }
  if (w.samples.empty()) {
    throw Error(ErrorKind::kCorruptContainer, path + ": no samples");
  }
  return w;
}

void WriteWav(const std::string& path, const Waveform& w) {
  if (w.sample_rate_hz != kSampleRateHz) {
    throw Error(ErrorKind::kUnsupportedFormat,
                "sample_rate=" + std::to_string(w.sample_rate_hz));
  }
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  PutU32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, kFormatPcm);
  PutU16(out, 1);
  PutU32(out, kSampleRateHz);
  PutU32(out, kSampleRateHz * 2);
  PutU16(out, 2);
  PutU16(out, 16);
  out += "data";
  PutU32(out, 2 * n);
  for (float s : w.samples) {
    const double scaled = std::round(static_cast<double>(s) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    PutU16(out, static_cast<std::uint16_t>(v));
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(ErrorKind::kIo, "write failed: " + path);
}

Waveform SynthClip(const TimbreProfile& profile, double duration_s,
                   std::uint64_t seed) {
  if (!(duration_s >= 0.1 && duration_s <= 30.0)) {
    throw Error(ErrorKind::kInvalidProfile,
                "duration_s must lie in [0.1, 30], got " + std::to_string(duration_s));
  }
  ValidateProfile(profile);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> noise_dist(-1.0, 1.0);

  const auto n = static_cast<std::size_t>(std::lround(duration_s * kSampleRateHz));
  std::vector<double> phases(profile.harmonic_amps.size());
  for (double& p : phases) p = phase_dist(rng);

  std::vector<double> acc(n, 0.0);
  for (std::size_t h = 0; h < profile.harmonic_amps.size(); ++h) {
    const double amp = profile.harmonic_amps[h];
    if (amp == 0.0) continue;
    const double omega =
        2.0 * std::numbers::pi * profile.fundamental_hz * static_cast<double>(h + 1) /
        kSampleRateHz;
    for (std::size_t t = 0; t < n; ++t) {
      acc[t] += amp * std::sin(omega * static_cast<double>(t) + phases[h]);
    }
  }
  if (profile.noise_floor > 0.0) {
    for (double& v : acc) v += profile.noise_floor * noise_dist(rng);
  }

  double peak = 0.0;
  for (double v : acc) peak = std::max(peak, std::abs(v));
  const double gain = peak > 0.0 ? 0.9 / peak : 0.0;

  Waveform w;
  w.samples.resize(n);
  for (std::size_t t = 0; t < n; ++t) w.samples[t] = static_cast<float>(acc[t] * gain);
  return w;
}

}  // namespace protoaudio
