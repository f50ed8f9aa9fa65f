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

// Flat "key = value" run configuration. One key per line, '#' starts a
// comment. Relative paths resolve against the directory of the config file.

#ifndef PROTOAUDIO_CLI_RUN_CONFIG_HPP_
#define PROTOAUDIO_CLI_RUN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "protoaudio/datasetkit/splits.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/encoders/spec.hpp"
#include "protoaudio/protonet/train.hpp"

namespace protoaudio::cli {

inline constexpr const char* kSeedEnvVar = "PROTOAUDIO_SEED";

struct RunConfig {
  encoders::EncoderKind encoder = encoders::EncoderKind::kVgg;
  encoders::Scale scale = encoders::Scale::kDesk;
  std::filesystem::path manifest;  // absolute once loaded
  std::filesystem::path splits;    // optional pre-made split file
  datasetkit::SplitRatios split_ratios;
  std::size_t min_per_class = 0;   // 0: n_shot + q_query
  bool record_timestamps = false;
  protonet::TrainConfig train;
  FrontendConfig frontend;

  std::size_t effective_min_per_class() const {
    return min_per_class == 0 ? train.n_shot + train.q_query : min_per_class;
  }
  encoders::EncoderSpec encoder_spec() const { return encoders::EncoderSpec::Make(encoder, scale); }

  // Throws ConfigError on inconsistent settings.
  void Validate() const;
};

// Throws ConfigError(line) on unknown keys or malformed values.
RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::string& path);

// Overrides train.seed from PROTOAUDIO_SEED when set. Returns true if applied.
bool ApplySeedOverride(RunConfig& cfg);

// Canonical text form; ParseRunConfig(FormatRunConfig(c)) == c.
std::string FormatRunConfig(const RunConfig& cfg);

}  // namespace protoaudio::cli

#endif  // PROTOAUDIO_CLI_RUN_CONFIG_HPP_
