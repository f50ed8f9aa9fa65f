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

#include "protoaudio/encoders/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "protoaudio/diff/ops.hpp"
#include "protoaudio/error.hpp"

namespace protoaudio::encoders {

using diff::Shape;
using diff::Tape;
using diff::Tensor;
using diff::Var;

namespace {

constexpr bool kVggPoolAfter[8] = {true, true, false, true, false, true, false, true};

int AddParam(diff::ParameterSet& params, const std::string& name, Tensor<float> value) {
  params.Add(name, std::move(value));
  return static_cast<int>(params.size() - 1);
}

template <typename T>
Var<T> ConstantRows(Tape<T>& tape, const FeatureMatrix& f) {
  Tensor<T> t({f.frames, f.n_mels});
  std::copy(f.values.begin(), f.values.end(), t.data.begin());
  return tape.Constant(std::move(t));
}

}  // namespace

std::vector<std::size_t> WindowStarts(std::size_t frames, std::size_t window,
                                      std::size_t hop) {
  if (frames < window) return {0};
  std::vector<std::size_t> starts;
  for (std::size_t s = 0; s + window <= frames; s += hop) starts.push_back(s);
  return starts;
}

bool Encoder::has_vgg() const {
  return spec_.kind == EncoderKind::kVgg || spec_.kind == EncoderKind::kSincVgg;
}

bool Encoder::has_lstm() const {
  return spec_.kind == EncoderKind::kLstm || spec_.kind == EncoderKind::kSincLstm;
}

Encoder::Encoder(EncoderSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  std::mt19937_64 rng(seed);
  const EncoderDims& d = spec_.dims;

  if (spec_.uses_waveform()) {
    const SincLayerParams init = SincInitMel(d.sinc_filters, kSampleRateHz, d.sinc_kernel);
    const std::size_t f = d.sinc_filters;
    Tensor<float> low({f}), band({f});
    for (std::size_t i = 0; i < f; ++i) {
      low.data[i] = static_cast<float>(init.theta_low[i]);
      band.data[i] = static_cast<float>(init.theta_band[i]);
    }
    slots_.sinc_low = AddParam(params_, "sinc.theta_low", std::move(low));
    slots_.sinc_band = AddParam(params_, "sinc.theta_band", std::move(band));
    for (std::size_t l = 0; l < d.sinc_conv_layers; ++l) {
      const std::string p = "sinc.conv" + std::to_string(l);
      slots_.sinc_conv_w.push_back(AddParam(
          params_, p + ".w",
          diff::KaimingUniform({f, f, d.sinc_conv_kernel}, f * d.sinc_conv_kernel, rng)));
      slots_.sinc_conv_b.push_back(AddParam(params_, p + ".b", Tensor<float>({f})));
    }
    if (spec_.kind == EncoderKind::kSincNet) {
      slots_.sincnet_proj_w = AddParam(
          params_, "sincnet.proj.w", diff::KaimingUniform({f, d.sincnet_embedding}, f, rng));
      slots_.sincnet_proj_b =
          AddParam(params_, "sincnet.proj.b", Tensor<float>({d.sincnet_embedding}));
    } else if (f != d.n_mels) {
      throw Error(ErrorKind::kDimensionMismatch,
                  "sinc layer has " + std::to_string(f) + " channels but the downstream " +
                      "encoder expects " + std::to_string(d.n_mels));
    }
  }

  if (has_vgg()) {
    std::size_t in = 1;
    for (int l = 0; l < 8; ++l) {
      const std::size_t out = d.vgg_channels[l];
      const std::string p = "vgg.conv" + std::to_string(l);
      slots_.vgg_conv_w[l] =
          AddParam(params_, p + ".w", diff::KaimingUniform({out, in, 3, 3}, in * 9, rng));
      slots_.vgg_conv_b[l] = AddParam(params_, p + ".b", Tensor<float>({out}));
      in = out;
    }
    const std::size_t flat = d.VggFlatSize();
    slots_.vgg_proj_w = AddParam(params_, "vgg.proj.w",
                                 diff::KaimingUniform({flat, d.vgg_embedding}, flat, rng));
    slots_.vgg_proj_b = AddParam(params_, "vgg.proj.b", Tensor<float>({d.vgg_embedding}));
  }

  if (has_lstm()) {
    const std::size_t h = d.lstm_hidden;
    const double bound = 1.0 / std::sqrt(static_cast<double>(h));
    slots_.lstm_wx = AddParam(params_, "lstm.wx", diff::ScaledUniform({d.n_mels, 4 * h}, bound, rng));
    slots_.lstm_wh = AddParam(params_, "lstm.wh", diff::ScaledUniform({h, 4 * h}, bound, rng));
    slots_.lstm_b = AddParam(params_, "lstm.b", Tensor<float>({4 * h}));
    slots_.lstm_proj_w =
        AddParam(params_, "lstm.proj.w", diff::KaimingUniform({h, d.lstm_output}, h, rng));
    slots_.lstm_proj_b = AddParam(params_, "lstm.proj.b", Tensor<float>({d.lstm_output}));
  }
}

template <typename T>
Var<T> Encoder::SincFeatureMap(Tape<T>& tape, const std::vector<Var<T>>& bound,
                               const Waveform& w) const {
  if (!spec_.uses_waveform()) {
    throw Error(ErrorKind::kConfig, EncoderKindName(spec_.kind) + " has no sinc layer");
  }
  const EncoderDims& d = spec_.dims;
  const std::size_t len = w.size();
  if (len < d.sinc_kernel) {
    throw Error(ErrorKind::kKernelTooLong, "sinc kernel of " + std::to_string(d.sinc_kernel) +
                                               " taps exceeds clip of " + std::to_string(len) +
                                               " samples");
  }
  const std::size_t conv_frames = (len - d.sinc_kernel) / d.sinc_stride + 1;
  if (conv_frames < d.sinc_pool) {
    throw Error(ErrorKind::kKernelTooLong,
                "clip of " + std::to_string(len) + " samples yields no pooled sinc frame");
  }
  Tensor<T> x({1, 1, len});
  std::copy(w.samples.begin(), w.samples.end(), x.data.begin());
  const Var<T> input = tape.Constant(std::move(x));

  const Var<T> filters = SincFilterBank(bound[slots_.sinc_low], bound[slots_.sinc_band],
                                        d.sinc_kernel, static_cast<double>(w.sample_rate_hz));
  Var<T> y = diff::Conv1d<T>(input, filters, std::nullopt, d.sinc_stride, 0);
  y = diff::Log(diff::AddScalar(diff::Abs(y), static_cast<T>(kSincLogOffset)));
  const std::size_t f = d.sinc_filters;
  y = diff::Reshape(y, {1, f, 1, conv_frames});
  y = diff::MaxPool2d(y, 1, d.sinc_pool, 1, d.sinc_pool);
  const std::size_t frames = y.shape()[3];
  y = diff::Reshape(y, {1, f, frames});
  for (std::size_t l = 0; l < slots_.sinc_conv_w.size(); ++l) {
    y = diff::Relu(diff::Conv1d<T>(y, bound[slots_.sinc_conv_w[l]], bound[slots_.sinc_conv_b[l]],
                                   1, d.sinc_conv_kernel / 2));
  }
  return diff::Reshape(y, {f, frames});
}

template <typename T>
Var<T> Encoder::VggPath(Tape<T>& tape, const std::vector<Var<T>>& bound,
                        const std::vector<Var<T>>& seqs) const {
  const EncoderDims& d = spec_.dims;
  const std::size_t win = d.window_frames;
  std::vector<Var<T>> windows;
  std::vector<std::size_t> per_clip;
  for (const Var<T>& seq : seqs) {
    const std::size_t frames = seq.shape()[0];
    if (frames < win) {
      windows.push_back(diff::Concat<T>(
          {seq, tape.Constant(Tensor<T>({win - frames, d.n_mels}))}, 0));
      per_clip.push_back(1);
      continue;
    }
    const auto starts = WindowStarts(frames, win, d.window_hop);
    for (std::size_t s : starts) {
      windows.push_back(starts.size() == 1 && frames == win ? seq
                                                             : diff::Slice(seq, 0, s, win));
    }
    per_clip.push_back(starts.size());
  }
  const std::size_t n_windows = windows.size();
  Var<T> x = windows.size() == 1 ? windows[0] : diff::Concat<T>(windows, 0);
  x = diff::Reshape(x, {n_windows, 1, win, d.n_mels});
  for (int l = 0; l < 8; ++l) {
    x = diff::Relu(
        diff::Conv2d<T>(x, bound[slots_.vgg_conv_w[l]], bound[slots_.vgg_conv_b[l]], 1, 1));
    if (kVggPoolAfter[l]) x = diff::MaxPool2d(x, 2, 2, 2, 2);
  }
  x = diff::Reshape(x, {n_windows, d.VggFlatSize()});
  x = diff::AddBias(diff::MatMul(x, bound[slots_.vgg_proj_w]), bound[slots_.vgg_proj_b]);

  // Per-clip window means as one [B, W] averaging matrix.
  Tensor<T> avg({seqs.size(), n_windows});
  std::size_t col = 0;
  for (std::size_t b = 0; b < per_clip.size(); ++b) {
    for (std::size_t j = 0; j < per_clip[b]; ++j) {
      avg.data[b * n_windows + col++] = T(1) / static_cast<T>(per_clip[b]);
    }
  }
  return diff::MatMul(tape.Constant(std::move(avg)), x);
}

template <typename T>
Var<T> Encoder::LstmPath(Tape<T>& tape, const std::vector<Var<T>>& bound,
                         const std::vector<Var<T>>& seqs) const {
  const std::size_t h = spec_.dims.lstm_hidden;
  const Var<T>& wh = bound[slots_.lstm_wh];
  std::vector<Var<T>> embeddings;
  for (const Var<T>& seq : seqs) {
    const std::size_t steps = seq.shape()[0];
    const Var<T> xw = diff::AddBias(diff::MatMul(seq, bound[slots_.lstm_wx]), bound[slots_.lstm_b]);
    Var<T> hidden = tape.Constant(Tensor<T>({1, h}));
    Var<T> cell = tape.Constant(Tensor<T>({1, h}));
    std::vector<Var<T>> outputs;
    outputs.reserve(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      const Var<T> z = diff::Add(diff::Slice(xw, 0, t, 1), diff::MatMul(hidden, wh));
      const Var<T> i = diff::Sigmoid(diff::Slice(z, 1, 0, h));
      const Var<T> f = diff::Sigmoid(diff::Slice(z, 1, h, h));
      const Var<T> g = diff::Tanh(diff::Slice(z, 1, 2 * h, h));
      const Var<T> o = diff::Sigmoid(diff::Slice(z, 1, 3 * h, h));
      cell = diff::Add(diff::Mul(f, cell), diff::Mul(i, g));
      hidden = diff::Mul(o, diff::Tanh(cell));
      outputs.push_back(hidden);
    }
    const Var<T> all = steps == 1 ? outputs[0] : diff::Concat<T>(outputs, 0);
    const Var<T> y =
        diff::AddBias(diff::MatMul(all, bound[slots_.lstm_proj_w]), bound[slots_.lstm_proj_b]);
    embeddings.push_back(diff::Reshape(diff::Mean(y, 0), {1, spec_.dims.lstm_output}));
  }
  return embeddings.size() == 1 ? embeddings[0] : diff::Concat<T>(embeddings, 0);
}

template <typename T>
Var<T> Encoder::Forward(Tape<T>& tape, const std::vector<Var<T>>& bound,
                        const std::vector<const ClipData*>& clips) const {
  if (clips.empty()) throw Error(ErrorKind::kShapeMismatch, "encoder forward on zero clips");
  if (bound.size() != params_.size()) {
    throw Error(ErrorKind::kShapeMismatch, "encoder forward expects " +
                                               std::to_string(params_.size()) +
                                               " bound parameters, got " +
                                               std::to_string(bound.size()));
  }
  const EncoderDims& d = spec_.dims;
  std::vector<Var<T>> seqs;
  if (spec_.uses_waveform()) {
    std::vector<Var<T>> pooled;
    for (const ClipData* c : clips) {
      const Var<T> fm = SincFeatureMap(tape, bound, c->waveform);  // [F, frames]
      if (spec_.kind == EncoderKind::kSincNet) {
        pooled.push_back(diff::Reshape(diff::Mean(fm, 1), {1, d.sinc_filters}));
      } else {
        seqs.push_back(diff::Transpose(fm));
      }
    }
    if (spec_.kind == EncoderKind::kSincNet) {
      const Var<T> x = pooled.size() == 1 ? pooled[0] : diff::Concat<T>(pooled, 0);
      return diff::AddBias(diff::MatMul(x, bound[slots_.sincnet_proj_w]),
                           bound[slots_.sincnet_proj_b]);
    }
  } else {
    for (const ClipData* c : clips) {
      if (c->features.n_mels != d.n_mels || c->features.frames == 0) {
        throw Error(ErrorKind::kDimensionMismatch,
                    "encoder expects " + std::to_string(d.n_mels) + "-channel frames, got " +
                        std::to_string(c->features.frames) + "x" +
                        std::to_string(c->features.n_mels));
      }
      seqs.push_back(ConstantRows(tape, c->features));
    }
  }
  return has_vgg() ? VggPath(tape, bound, seqs) : LstmPath(tape, bound, seqs);
}

Tensor<float> Encoder::Embed(const std::vector<const ClipData*>& clips,
                             std::size_t chunk) const {
  const std::size_t dim = spec_.embedding_dim();
  Tensor<float> out({clips.size(), dim});
  chunk = std::max<std::size_t>(chunk, 1);
  for (std::size_t begin = 0; begin < clips.size(); begin += chunk) {
    const std::size_t end = std::min(clips.size(), begin + chunk);
    Tape<float> tape;
    const auto bound = diff::BindParameters<float>(tape, params_, false);
    const std::vector<const ClipData*> part(clips.begin() + begin, clips.begin() + end);
    const Var<float> e = Forward(tape, bound, part);
    std::copy(e.value().data.begin(), e.value().data.end(), out.data.begin() + begin * dim);
  }
  return out;
}

SincLayerParams Encoder::sinc_params() const {
  if (!spec_.uses_waveform()) {
    throw Error(ErrorKind::kConfig, EncoderKindName(spec_.kind) + " has no sinc layer");
  }
  SincLayerParams p;
  p.kernel_len = spec_.dims.sinc_kernel;
  p.sample_rate_hz = kSampleRateHz;
  const auto& low = params_[slots_.sinc_low].data;
  const auto& band = params_[slots_.sinc_band].data;
  p.theta_low.assign(low.begin(), low.end());
  p.theta_band.assign(band.begin(), band.end());
  return p;
}

diff::Checkpoint Encoder::ToCheckpoint(std::map<std::string, std::string> extra_header) const {
  auto header = spec_.Header();
  header.merge(extra_header);
  return diff::Checkpoint::FromParameters(params_, std::move(header));
}

void Encoder::Restore(const diff::Checkpoint& ckpt) {
  spec_.RequireMatches(ckpt.header);
  ckpt.RestoreInto(params_);
}

Encoder Encoder::FromCheckpoint(const diff::Checkpoint& ckpt) {
  auto field = [&](const std::string& key) {
    auto it = ckpt.header.find(key);
    if (it == ckpt.header.end()) {
      throw Error(ErrorKind::kCheckpointMismatch, "checkpoint lacks header key '" + key + "'");
    }
    return it->second;
  };
  Encoder enc(EncoderSpec::Make(ParseEncoderKind(field("encoder")), ParseScale(field("scale"))),
              0);
  enc.Restore(ckpt);
  return enc;
}

#define PROTOAUDIO_INSTANTIATE_ENCODER(T)                                                   \
  template Var<T> Encoder::Forward(Tape<T>&, const std::vector<Var<T>>&,                    \
                                   const std::vector<const ClipData*>&) const;              \
  template Var<T> Encoder::SincFeatureMap(Tape<T>&, const std::vector<Var<T>>&,             \
                                          const Waveform&) const;

PROTOAUDIO_INSTANTIATE_ENCODER(float)
PROTOAUDIO_INSTANTIATE_ENCODER(double)

}  // namespace protoaudio::encoders
