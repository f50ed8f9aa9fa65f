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

#ifndef PROTOAUDIO_ENCODERS_SPEC_HPP_
#define PROTOAUDIO_ENCODERS_SPEC_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <string>

namespace protoaudio::encoders {

enum class EncoderKind { kVgg, kLstm, kSincNet, kSincVgg, kSincLstm };
enum class Scale { kPaper, kDesk };

// Names used in configs and checkpoint headers: vgg, lstm, sincnet,
// sincnet+vgg, sincnet+lstm; paper, desk.
std::string EncoderKindName(EncoderKind kind);
EncoderKind ParseEncoderKind(const std::string& name);
std::string ScaleName(Scale scale);
Scale ParseScale(const std::string& name);

struct EncoderDims {
  std::size_t n_mels = 64;
  std::size_t window_frames = 96;
  std::size_t window_hop = 48;

  // VGG11 body: 8 conv layers (3x3, pad 1), 2x2 pools after layers 1, 2, 4, 6, 8.
  std::array<std::size_t, 8> vgg_channels{};
  std::size_t vgg_embedding = 0;

  std::size_t lstm_hidden = 0;
  std::size_t lstm_output = 0;

  std::size_t sinc_filters = 64;
  std::size_t sinc_kernel = 251;
  std::size_t sinc_stride = 80;
  std::size_t sinc_pool = 2;
  std::size_t sinc_conv_layers = 2;
  std::size_t sinc_conv_kernel = 5;
  std::size_t sincnet_embedding = 0;

  // Flattened size of the last VGG feature map for a 96 x n_mels window.
  std::size_t VggFlatSize() const;
};

EncoderDims DimsFor(Scale scale);

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kVgg;
  Scale scale = Scale::kDesk;
  EncoderDims dims;

  static EncoderSpec Make(EncoderKind kind, Scale scale);

  std::size_t embedding_dim() const;
  // True when the encoder consumes raw waveforms rather than log-mel frames.
  bool uses_waveform() const;

  // Checkpoint header entries. RequireMatches throws CheckpointMismatch on any
  // differing or missing key.
  std::map<std::string, std::string> Header() const;
  void RequireMatches(const std::map<std::string, std::string>& header) const;
};

}  // namespace protoaudio::encoders

#endif  // PROTOAUDIO_ENCODERS_SPEC_HPP_
