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

#include "protoaudio/datasetkit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <random>

#include "protoaudio/error.hpp"

namespace protoaudio::datasetkit {
namespace {

constexpr double kGridLowHz = 80.0;
constexpr double kGridStepHz = 40.0;
constexpr std::size_t kGridSlots = 49;  // 80 .. 2000 Hz
constexpr double kMaxPartialHz = 7900.0;

std::uint64_t Mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<TimbreProfile> SyntheticProfiles(std::size_t n_classes, std::uint64_t seed) {
  if (n_classes < 2 || n_classes > kGridSlots) {
    throw Error(ErrorKind::kConfig, "synthetic corpus supports 2.." + std::to_string(kGridSlots) +
                                        " classes, got " + std::to_string(n_classes));
  }
  std::mt19937_64 rng(Mix(seed, 0));
  std::vector<std::size_t> slots(kGridSlots);
  std::iota(slots.begin(), slots.end(), 0);
  for (std::size_t i = 0; i < n_classes; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, kGridSlots - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }
  std::uniform_real_distribution<double> amp(0.1, 1.0);
  std::uniform_real_distribution<double> noise(0.005, 0.03);
  std::vector<TimbreProfile> out;
  for (std::size_t c = 0; c < n_classes; ++c) {
    TimbreProfile p;
    p.fundamental_hz = kGridLowHz + kGridStepHz * static_cast<double>(slots[c]);
    // Leave headroom so pitch jitter never pushes a partial past Nyquist.
    const auto fit = static_cast<std::size_t>(7600.0 / p.fundamental_hz);
    const std::size_t n_harm = std::clamp<std::size_t>(fit, 1, 8);
    p.harmonic_amps.clear();
    for (std::size_t h = 0; h < n_harm; ++h) p.harmonic_amps.push_back(amp(rng));
    p.noise_floor = noise(rng);
    out.push_back(std::move(p));
  }
  return out;
}

Waveform SyntheticClip(const TimbreProfile& profile, std::uint64_t seed,
                       const SyntheticJitter& jitter) {
  std::mt19937_64 rng(Mix(seed, 1));
  auto uniform = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  TimbreProfile p = profile;
  p.fundamental_hz =
      std::clamp(p.fundamental_hz * (1.0 + uniform(-jitter.pitch, jitter.pitch)), 80.0, 2000.0);
  for (double& a : p.harmonic_amps) {
    a *= 1.0 + uniform(-jitter.harmonic_amp, jitter.harmonic_amp);
  }
  // Large pitch jitter can lift upper partials past the profile's headroom.
  const auto keep = static_cast<std::size_t>(kMaxPartialHz / p.fundamental_hz);
  if (p.harmonic_amps.size() > keep) p.harmonic_amps.resize(std::max<std::size_t>(keep, 1));
  p.noise_floor = std::min(0.1, p.noise_floor * uniform(jitter.noise_scale_lo, jitter.noise_scale_hi));
  const double duration = uniform(jitter.min_duration_s, jitter.max_duration_s);
  const double gain = uniform(jitter.min_gain, jitter.max_gain);
  Waveform w = SynthClip(p, duration, Mix(seed, 2));
  for (float& s : w.samples) s = static_cast<float>(s * gain);
  return w;
}

std::string SyntheticClassId(std::size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "class_%02zu", c);
  return buf;
}

Manifest GenSyntheticCorpus(const std::string& out_dir, std::size_t n_classes,
                            std::size_t clips_per_class, std::uint64_t seed,
                            const SyntheticJitter& jitter) {
  if (clips_per_class == 0) throw Error(ErrorKind::kConfig, "clips_per_class must be positive");
  const auto profiles = SyntheticProfiles(n_classes, seed);
  const std::filesystem::path root(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create " + out_dir + ": " + ec.message());

  Manifest m;
  m.base_dir = root;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::string id = SyntheticClassId(c);
    std::filesystem::create_directories(root / id, ec);
    if (ec) throw Error(ErrorKind::kIo, "cannot create " + (root / id).string());
    for (std::size_t i = 0; i < clips_per_class; ++i) {
      char name[32];
      std::snprintf(name, sizeof(name), "clip_%03zu.wav", i);
      const std::string rel = id + "/" + name;
      const Waveform w = SyntheticClip(profiles[c], Mix(seed, 1000 + c * 100003 + i), jitter);
      WriteWav((root / rel).string(), w);
      m.entries.push_back({rel, {id}});
    }
  }
  m.Reindex();
  WriteManifest((root / "manifest.tsv").string(), m);
  return m;
}

}  // namespace protoaudio::datasetkit
