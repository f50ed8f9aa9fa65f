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

#include "protoaudio/encoders/spec.hpp"

#include "protoaudio/error.hpp"

namespace protoaudio::encoders {

std::string EncoderKindName(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kVgg: return "vgg";
    case EncoderKind::kLstm: return "lstm";
    case EncoderKind::kSincNet: return "sincnet";
    case EncoderKind::kSincVgg: return "sincnet+vgg";
    case EncoderKind::kSincLstm: return "sincnet+lstm";
  }
  return "?";
}

EncoderKind ParseEncoderKind(const std::string& name) {
  for (EncoderKind k : {EncoderKind::kVgg, EncoderKind::kLstm, EncoderKind::kSincNet,
                        EncoderKind::kSincVgg, EncoderKind::kSincLstm}) {
    if (EncoderKindName(k) == name) return k;
  }
  throw Error(ErrorKind::kConfig, "unknown encoder kind '" + name + "'");
}

std::string ScaleName(Scale scale) { return scale == Scale::kPaper ? "paper" : "desk"; }

Scale ParseScale(const std::string& name) {
  if (name == "paper") return Scale::kPaper;
  if (name == "desk") return Scale::kDesk;
  throw Error(ErrorKind::kConfig, "unknown scale '" + name + "'");
}

std::size_t EncoderDims::VggFlatSize() const {
  // Five 2x2 pools: 96 x 64 -> 3 x 2.
  std::size_t h = window_frames, w = n_mels;
  for (int i = 0; i < 5; ++i) {
    h /= 2;
    w /= 2;
  }
  return vgg_channels.back() * h * w;
}

EncoderDims DimsFor(Scale scale) {
  EncoderDims d;
  if (scale == Scale::kPaper) {
    d.vgg_channels = {64, 128, 256, 256, 512, 512, 512, 512};
    d.lstm_hidden = 4096;
    d.lstm_output = 2048;
    d.sincnet_embedding = 2048;
  } else {
    d.vgg_channels = {8, 16, 32, 32, 64, 64, 64, 64};
    d.lstm_hidden = 128;
    d.lstm_output = 64;
    d.sincnet_embedding = 128;
  }
  d.vgg_embedding = d.VggFlatSize();
  return d;
}

EncoderSpec EncoderSpec::Make(EncoderKind kind, Scale scale) {
  EncoderSpec s;
  s.kind = kind;
  s.scale = scale;
  s.dims = DimsFor(scale);
  return s;
}

std::size_t EncoderSpec::embedding_dim() const {
  switch (kind) {
    case EncoderKind::kVgg:
    case EncoderKind::kSincVgg: return dims.vgg_embedding;
    case EncoderKind::kLstm:
    case EncoderKind::kSincLstm: return dims.lstm_output;
    case EncoderKind::kSincNet: return dims.sincnet_embedding;
  }
  return 0;
}

bool EncoderSpec::uses_waveform() const {
  return kind == EncoderKind::kSincNet || kind == EncoderKind::kSincVgg ||
         kind == EncoderKind::kSincLstm;
}

std::map<std::string, std::string> EncoderSpec::Header() const {
  return {
      {"encoder", EncoderKindName(kind)},
      {"scale", ScaleName(scale)},
      {"embedding_dim", std::to_string(embedding_dim())},
      {"n_mels", std::to_string(dims.n_mels)},
      {"lstm_hidden", std::to_string(dims.lstm_hidden)},
      {"vgg_channels_last", std::to_string(dims.vgg_channels.back())},
      {"sinc_filters", std::to_string(dims.sinc_filters)},
      {"sinc_kernel", std::to_string(dims.sinc_kernel)},
  };
}

void EncoderSpec::RequireMatches(const std::map<std::string, std::string>& header) const {
  for (const auto& [key, want] : Header()) {
    auto it = header.find(key);
    if (it == header.end()) {
      throw Error(ErrorKind::kCheckpointMismatch, "checkpoint lacks header key '" + key + "'");
    }
    if (it->second != want) {
      throw Error(ErrorKind::kCheckpointMismatch, "checkpoint " + key + "=" + it->second +
                                                      " but encoder expects " + want);
    }
  }
}

}  // namespace protoaudio::encoders
