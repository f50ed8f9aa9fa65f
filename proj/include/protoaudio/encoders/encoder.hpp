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

// Clip encoders f_theta. Every encoder maps a batch of clips of any duration
// to a [B, D] embedding matrix.
//
//   vgg           log-mel windows (96 frames, hop 48) -> VGG11 body -> linear
//                 projection, averaged over the clip's windows
//   lstm          one log-mel frame per step -> LSTM -> per-step projection,
//                 averaged over time
//   sincnet       sinc layer -> mean over time -> linear projection
//   sincnet+vgg   sinc feature map (time x 64) fed to the vgg path
//   sincnet+lstm  sinc feature map (time x 64) fed to the lstm path
//
// The sinc layer is: learnable band-pass conv (stride 80) -> abs ->
// log(x + 1e-6) -> max-pool 2 -> two conv1d(64, kernel 5) + relu layers.

#ifndef PROTOAUDIO_ENCODERS_ENCODER_HPP_
#define PROTOAUDIO_ENCODERS_ENCODER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "protoaudio/audio_io.hpp"
#include "protoaudio/diff/checkpoint.hpp"
#include "protoaudio/diff/params.hpp"
#include "protoaudio/diff/tape.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/encoders/sinc.hpp"
#include "protoaudio/encoders/spec.hpp"

namespace protoaudio::encoders {

inline constexpr double kSincLogOffset = 1e-6;

// Model input for one clip. Log-mel encoders read `features`; sinc-based
// encoders read `waveform`. Either may be left empty when unused.
struct ClipData {
  Waveform waveform;
  FeatureMatrix features;
};

// Start frames of the 96-frame windows of a T-frame clip. Always non-empty:
// a clip shorter than one window yields {0} and is zero-padded.
std::vector<std::size_t> WindowStarts(std::size_t frames, std::size_t window,
                                      std::size_t hop);

class Encoder {
 public:
  Encoder(EncoderSpec spec, std::uint64_t seed);

  const EncoderSpec& spec() const { return spec_; }
  diff::ParameterSet& params() { return params_; }
  const diff::ParameterSet& params() const { return params_; }

  // Records the forward pass on `tape`; `bound` must come from
  // diff::BindParameters on params(). Returns [clips.size(), embedding_dim].
  template <typename T>
  diff::Var<T> Forward(diff::Tape<T>& tape, const std::vector<diff::Var<T>>& bound,
                       const std::vector<const ClipData*>& clips) const;

  // Sinc-layer output [n_filters, frames] for one waveform (sinc kinds only).
  template <typename T>
  diff::Var<T> SincFeatureMap(diff::Tape<T>& tape, const std::vector<diff::Var<T>>& bound,
                              const Waveform& w) const;

  // Gradient-free inference, chunked to bound tape memory.
  diff::Tensor<float> Embed(const std::vector<const ClipData*>& clips,
                            std::size_t chunk = 16) const;

  // Current sinc parameters (sinc kinds only).
  SincLayerParams sinc_params() const;

  diff::Checkpoint ToCheckpoint(std::map<std::string, std::string> extra_header = {}) const;
  // Rejects checkpoints written for another kind, scale or dimension table.
  void Restore(const diff::Checkpoint& ckpt);
  static Encoder FromCheckpoint(const diff::Checkpoint& ckpt);

 private:
  template <typename T>
  diff::Var<T> VggPath(diff::Tape<T>& tape, const std::vector<diff::Var<T>>& bound,
                       const std::vector<diff::Var<T>>& seqs) const;
  template <typename T>
  diff::Var<T> LstmPath(diff::Tape<T>& tape, const std::vector<diff::Var<T>>& bound,
                        const std::vector<diff::Var<T>>& seqs) const;

  bool has_vgg() const;
  bool has_lstm() const;

  EncoderSpec spec_;
  diff::ParameterSet params_;
  // Parameter indices; -1 when the encoder kind lacks the block.
  struct Slots {
    int vgg_conv_w[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
    int vgg_conv_b[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
    int vgg_proj_w = -1, vgg_proj_b = -1;
    int lstm_wx = -1, lstm_wh = -1, lstm_b = -1, lstm_proj_w = -1, lstm_proj_b = -1;
    int sinc_low = -1, sinc_band = -1;
    std::vector<int> sinc_conv_w, sinc_conv_b;
    int sincnet_proj_w = -1, sincnet_proj_b = -1;
  } slots_;
};

}  // namespace protoaudio::encoders

#endif  // PROTOAUDIO_ENCODERS_ENCODER_HPP_
