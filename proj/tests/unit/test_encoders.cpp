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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "protoaudio/diff/ops.hpp"
#include "protoaudio/encoders/encoder.hpp"
#include "test_util.hpp"

using protoaudio::Error;
using protoaudio::ErrorKind;
using protoaudio::FeatureMatrix;
using protoaudio::Waveform;
using protoaudio::diff::Tape;
using protoaudio::diff::Tensor;
using namespace protoaudio::encoders;
namespace diff = protoaudio::diff;

namespace {

FeatureMatrix RandomFeatures(std::size_t frames, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  FeatureMatrix f;
  f.frames = frames;
  f.n_mels = 64;
  for (double v : protoaudio::testing::RandomVector(frames * 64, rng, -8.0, 2.0)) {
    f.values.push_back(static_cast<float>(v));
  }
  return f;
}

FeatureMatrix Rows(const FeatureMatrix& f, std::size_t start, std::size_t count) {
  FeatureMatrix out;
  out.frames = count;
  out.n_mels = f.n_mels;
  out.values.assign(f.values.begin() + start * f.n_mels,
                    f.values.begin() + (start + count) * f.n_mels);
  return out;
}

Waveform Noise(double seconds, std::uint64_t seed, float amp = 0.5f) {
  std::mt19937_64 rng(seed);
  Waveform w;
  for (double v : protoaudio::testing::RandomVector(
           static_cast<std::size_t>(seconds * 16000), rng, -amp, amp)) {
    w.samples.push_back(static_cast<float>(v));
  }
  return w;
}

ClipData FromFeatures(FeatureMatrix f) { return ClipData{{}, std::move(f)}; }
ClipData FromWave(Waveform w) { return ClipData{std::move(w), {}}; }

std::vector<float> EmbedOne(const Encoder& enc, const ClipData& c) {
  return enc.Embed({&c}).data;
}

double MaxAbsDiff(const std::vector<float>& a, const std::vector<float>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(static_cast<double>(a[i]) - b[i]));
  }
  return m;
}

// Plain-loop LSTM with gate blocks (i, f, g, o), projecting every hidden state
// and averaging the projections.
std::vector<double> NaiveLstm(const diff::ParameterSet& p, const FeatureMatrix& x) {
  const auto& wx = p.at("lstm.wx");
  const auto& wh = p.at("lstm.wh");
  const auto& b = p.at("lstm.b");
  const auto& pw = p.at("lstm.proj.w");
  const auto& pb = p.at("lstm.proj.b");
  const std::size_t in = wx.dim(0), h4 = wx.dim(1), h = h4 / 4, out = pw.dim(1);
  auto sig = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  std::vector<double> hid(h, 0.0), cell(h, 0.0), acc(out, 0.0);
  for (std::size_t t = 0; t < x.frames; ++t) {
    std::vector<double> z(h4);
    for (std::size_t j = 0; j < h4; ++j) {
      double s = b.data[j];
      for (std::size_t k = 0; k < in; ++k) s += x.at(t, k) * wx.data[k * h4 + j];
      for (std::size_t k = 0; k < h; ++k) s += hid[k] * wh.data[k * h4 + j];
      z[j] = s;
    }
    for (std::size_t k = 0; k < h; ++k) {
      cell[k] = sig(z[h + k]) * cell[k] + sig(z[k]) * std::tanh(z[2 * h + k]);
      hid[k] = sig(z[3 * h + k]) * std::tanh(cell[k]);
    }
    for (std::size_t j = 0; j < out; ++j) {
      double s = pb.data[j];
      for (std::size_t k = 0; k < h; ++k) s += hid[k] * pw.data[k * out + j];
      acc[j] += s;
    }
  }
  for (double& v : acc) v /= static_cast<double>(x.frames);
  return acc;
}

}  // namespace

TEST_CASE("encoder dimension tables") {
  const EncoderDims paper = DimsFor(Scale::kPaper);
  CHECK(paper.lstm_hidden == 4096);
  CHECK(paper.lstm_output == 2048);
  CHECK(paper.vgg_embedding == 3072);
  CHECK(paper.VggFlatSize() == 3072);
  CHECK(paper.n_mels == 64);
  CHECK(paper.window_frames == 96);
  CHECK(paper.window_hop == 48);

  const EncoderDims desk = DimsFor(Scale::kDesk);
  CHECK(desk.lstm_hidden == 128);
  CHECK(desk.lstm_output == 64);
  CHECK(desk.vgg_embedding == 384);
  CHECK(desk.sinc_filters == 64);
  CHECK(desk.sinc_kernel == 251);
  CHECK(desk.sinc_stride == 80);
  for (std::size_t i = 0; i < 8; ++i) CHECK(desk.vgg_channels[i] * 8 == paper.vgg_channels[i]);

  for (auto kind : {EncoderKind::kVgg, EncoderKind::kLstm, EncoderKind::kSincNet,
                    EncoderKind::kSincVgg, EncoderKind::kSincLstm}) {
    CHECK(ParseEncoderKind(EncoderKindName(kind)) == kind);
  }
  CHECK(EncoderSpec::Make(EncoderKind::kSincLstm, Scale::kPaper).embedding_dim() == 2048);
  CHECK_THROWS_AS(ParseEncoderKind("resnet"), Error);
}

TEST_CASE("window count follows floor((T - 96) / 48) + 1") {
  CHECK(WindowStarts(98, 96, 48) == std::vector<std::size_t>{0});
  CHECK(WindowStarts(96, 96, 48) == std::vector<std::size_t>{0});
  CHECK(WindowStarts(192, 96, 48) == std::vector<std::size_t>{0, 48, 96});
  CHECK(WindowStarts(40, 96, 48) == std::vector<std::size_t>{0});
  for (std::size_t t = 96; t < 700; t += 7) {
    CHECK(WindowStarts(t, 96, 48).size() == (t - 96) / 48 + 1);
  }
}

TEST_CASE("vgg: clip embedding is the mean of per-window embeddings") {
  const Encoder enc(EncoderSpec::Make(EncoderKind::kVgg, Scale::kDesk), 7);

  SUBCASE("T = 98 uses only the first window") {
    const FeatureMatrix f = RandomFeatures(98, 1);
    const auto whole = EmbedOne(enc, FromFeatures(f));
    const auto first = EmbedOne(enc, FromFeatures(Rows(f, 0, 96)));
    CHECK(whole.size() == 384);
    CHECK(MaxAbsDiff(whole, first) < 1e-5);
  }

  SUBCASE("T = 192 averages windows starting at 0, 48, 96") {
    const FeatureMatrix f = RandomFeatures(192, 2);
    const auto whole = EmbedOne(enc, FromFeatures(f));
    std::vector<float> mean(whole.size(), 0.0f);
    for (std::size_t s : {0, 48, 96}) {
      const auto w = EmbedOne(enc, FromFeatures(Rows(f, s, 96)));
      for (std::size_t i = 0; i < w.size(); ++i) mean[i] += w[i] / 3.0f;
    }
    CHECK(MaxAbsDiff(whole, mean) < 1e-5);
  }

  SUBCASE("short clips are zero-padded to one window") {
    FeatureMatrix f = RandomFeatures(50, 3);
    FeatureMatrix padded = f;
    padded.frames = 96;
    padded.values.resize(96 * 64, 0.0f);
    CHECK(MaxAbsDiff(EmbedOne(enc, FromFeatures(f)), EmbedOne(enc, FromFeatures(padded))) < 1e-6);
  }

  SUBCASE("batched clips equal individually embedded clips") {
    const ClipData a = FromFeatures(RandomFeatures(150, 4));
    const ClipData b = FromFeatures(RandomFeatures(96, 5));
    const auto both = enc.Embed({&a, &b}).data;
    const auto ea = EmbedOne(enc, a), eb = EmbedOne(enc, b);
    std::vector<float> joined = ea;
    joined.insert(joined.end(), eb.begin(), eb.end());
    float scale = 0.0f;
    for (float v : joined) scale = std::max(scale, std::abs(v));
    CHECK(MaxAbsDiff(both, joined) < 1e-5 * scale);
  }
}

TEST_CASE("lstm matches an explicit unroll") {
  const Encoder enc(EncoderSpec::Make(EncoderKind::kLstm, Scale::kDesk), 11);

  SUBCASE("T = 1") {
    const FeatureMatrix f = RandomFeatures(1, 6);
    const auto got = EmbedOne(enc, FromFeatures(f));
    const auto want = NaiveLstm(enc.params(), f);
    REQUIRE(got.size() == 64);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-4));
  }

  SUBCASE("constant input repeated") {
    FeatureMatrix f = RandomFeatures(1, 7);
    const auto frame = f.values;
    f.frames = 40;
    for (int t = 1; t < 40; ++t) f.values.insert(f.values.end(), frame.begin(), frame.end());
    const auto got = EmbedOne(enc, FromFeatures(f));
    const auto want = NaiveLstm(enc.params(), f);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) < 1e-4);
  }

  SUBCASE("frame order matters") {
    const FeatureMatrix f = RandomFeatures(30, 8);
    FeatureMatrix rev = f;
    for (std::size_t t = 0; t < 30; ++t) {
      for (std::size_t m = 0; m < 64; ++m) rev.at(t, m) = f.at(29 - t, m);
    }
    CHECK(MaxAbsDiff(EmbedOne(enc, FromFeatures(f)), EmbedOne(enc, FromFeatures(rev))) > 1e-4);
  }
}

TEST_CASE("sinc kernel: low-pass limit, centre tap, band-pass response") {
  const double sr = 16000.0;
  const std::size_t k = 251;
  const auto window = protoaudio::HammingWindow(k);
  double window_sum = 0.0;
  for (double w : window) window_sum += w;

  // f1 = 0 with a very small f2: every tap is ~2 f2 w[n].
  const double f2_norm = 1e-5;
  const auto lp = SincKernel({0.0, f2_norm * sr}, k, sr);
  double dc = 0.0;
  for (double g : lp) dc += g;
  CHECK(std::abs(dc - 2.0 * f2_norm * window_sum) < 1e-6);

  const SincCutoffs band{1000.0, 3000.0};
  const auto g = SincKernel(band, k, sr);
  CHECK(g[k / 2] == doctest::Approx(2.0 * 3000.0 / sr - 2.0 * 1000.0 / sr).epsilon(1e-12));
  CHECK(protoaudio::HammingWeight(k / 2, k) == 1.0);

  auto response = [&](double hz) {
    std::complex<double> acc = 0.0;
    for (std::size_t m = 0; m < k; ++m) {
      acc += g[m] * std::polar(1.0, -2.0 * std::numbers::pi * hz / sr * static_cast<double>(m));
    }
    return std::abs(acc);
  };
  const double centre = response(2000.0);
  CHECK(centre > response(0.0));
  CHECK(centre > response(8000.0));
  CHECK(centre == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sinc mel initialisation") {
  const SincLayerParams p = SincInitMel(64, 16000.0);
  REQUIRE(p.n_filters() == 64);
  std::vector<SincCutoffs> c;
  for (std::size_t i = 0; i < 64; ++i) {
    c.push_back(EffectiveCutoffs(p.theta_low[i], p.theta_band[i], 16000.0));
  }
  CHECK(c.front().f1_hz == 30.0);
  CHECK(c.back().f2_hz == doctest::Approx(7900.0).epsilon(1e-12));
  std::vector<double> centre_mel;
  for (const auto& cut : c) centre_mel.push_back(protoaudio::HzToMel(SincBandCenterHz(cut)));
  const double step = centre_mel[1] - centre_mel[0];
  for (std::size_t i = 1; i < 64; ++i) {
    CHECK(centre_mel[i] > centre_mel[i - 1]);
    CHECK(std::abs(centre_mel[i] - centre_mel[i - 1] - step) < 1e-6);
    CHECK(std::abs(c[i - 1].f2_hz - c[i].f1_hz) < 1e-9);
  }
  CHECK_THROWS_AS(SincInitMel(1, 16000.0), Error);
}

TEST_CASE("sinc cutoffs stay ordered and inside [0, nyquist] under random Adam steps") {
  std::mt19937_64 rng(21);
  const SincLayerParams init = SincInitMel(64, 16000.0);
  std::vector<Tensor<float>> params = {Tensor<float>({64}), Tensor<float>({64})};
  for (std::size_t i = 0; i < 64; ++i) {
    params[0].data[i] = static_cast<float>(init.theta_low[i]);
    params[1].data[i] = static_cast<float>(init.theta_band[i]);
  }
  diff::AdamState state;
  diff::AdamConfig cfg;
  cfg.lr = 400.0;  // large enough to push many filters into the clamps
  for (int step = 0; step < 100; ++step) {
    std::vector<Tensor<float>> grads;
    for (int j = 0; j < 2; ++j) {
      Tensor<float> g({64});
      const auto r = protoaudio::testing::RandomVector(64, rng);
      for (std::size_t i = 0; i < 64; ++i) g.data[i] = static_cast<float>(r[i]);
      grads.push_back(std::move(g));
    }
    diff::AdamStep(params, grads, state, cfg);

    Tape<double> tape;
    auto low = tape.Leaf(params[0].Cast<double>(), false);
    auto band = tape.Leaf(params[1].Cast<double>(), false);
    const auto bank = SincFilterBank(low, band, 251, 16000.0).value();
    for (std::size_t i = 0; i < 64; ++i) {
      const SincCutoffs c = EffectiveCutoffs(params[0].data[i], params[1].data[i], 16000.0);
      CHECK(c.f1_hz >= 0.0);
      CHECK(c.f1_hz < c.f2_hz);
      CHECK(c.f2_hz <= 8000.0);
      CHECK(bank.data[i * 251 + 125] == doctest::Approx(2.0 * (c.f2_hz - c.f1_hz) / 16000.0));
    }
  }
}

TEST_CASE("sinc layer shape and kernel-length errors") {
  const Encoder enc(EncoderSpec::Make(EncoderKind::kSincNet, Scale::kDesk), 3);
  Tape<float> tape;
  const auto bound = diff::BindParameters<float>(tape, enc.params(), false);
  const auto fm = enc.SincFeatureMap(tape, bound, Noise(1.0, 1));
  // (16000 - 251) / 80 + 1 = 197 conv frames, pooled to 98.
  CHECK(fm.shape() == diff::Shape{64, 98});

  try {
    enc.SincFeatureMap(tape, bound, Noise(200.0 / 16000.0, 2));
    FAIL("short clip accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kKernelTooLong);
  }
}

TEST_CASE("composed encoders") {
  const Encoder sl(EncoderSpec::Make(EncoderKind::kSincLstm, Scale::kDesk), 5);
  const ClipData noise = FromWave(Noise(1.0, 9));
  const auto e1 = EmbedOne(sl, noise);
  CHECK(e1.size() == sl.spec().dims.lstm_output);
  CHECK(EmbedOne(sl, noise) == e1);

  EncoderSpec bad = EncoderSpec::Make(EncoderKind::kSincVgg, Scale::kDesk);
  bad.dims.sinc_filters = 32;
  try {
    Encoder e(bad, 1);
    FAIL("channel mismatch accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionMismatch);
  }
}

TEST_CASE("one training step moves the sinc cutoffs") {
  Encoder enc(EncoderSpec::Make(EncoderKind::kSincVgg, Scale::kDesk), 13);
  std::vector<ClipData> clips;
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < 2; ++i) {
      clips.push_back(FromWave(protoaudio::SynthClip({c == 0 ? 220.0 : 660.0, {1.0, 0.5}, 0.02},
                                                     1.0, 10 * c + i)));
    }
  }
  std::vector<const ClipData*> ptrs;
  for (const auto& c : clips) ptrs.push_back(&c);

  const auto before = enc.sinc_params();
  Tape<float> tape;
  const auto bound = diff::BindParameters<float>(tape, enc.params(), true);
  const auto emb = enc.Forward(tape, bound, ptrs);
  // Support = clips 0 and 2, query = clips 1 and 3. The untrained embedding
  // already separates these timbres so well that true labels give a saturated
  // zero loss; the queries are labelled with the opposite class instead.
  auto support = diff::Concat<float>({diff::Slice(emb, 0, 0, 1), diff::Slice(emb, 0, 2, 1)}, 0);
  auto query = diff::Concat<float>({diff::Slice(emb, 0, 1, 1), diff::Slice(emb, 0, 3, 1)}, 0);
  auto loss = diff::CrossEntropy(diff::Scale(diff::SquaredEuclidean(query, support), -1.0f), {1, 0});
  REQUIRE(loss.value().item() > 1e-3f);
  auto grads = diff::CollectGradients(tape.Backward(loss), bound);
  diff::AdamState state;
  diff::AdamStep(enc.params().values(), grads, state, {});

  const auto after = enc.sinc_params();
  int changed = 0;
  for (std::size_t i = 0; i < after.n_filters(); ++i) {
    changed += after.theta_low[i] != before.theta_low[i];
    changed += after.theta_band[i] != before.theta_band[i];
  }
  CHECK(changed > 0);
}

TEST_CASE("embedding size is independent of clip duration") {
  for (auto kind : {EncoderKind::kVgg, EncoderKind::kLstm, EncoderKind::kSincNet,
                    EncoderKind::kSincVgg, EncoderKind::kSincLstm}) {
    const Encoder enc(EncoderSpec::Make(kind, Scale::kDesk), 2);
    for (double seconds : {0.5, 1.0, 3.0}) {
      const Waveform w = Noise(seconds, 4);
      const ClipData clip{w, protoaudio::ExtractFeatures(w)};
      INFO(EncoderKindName(kind) << " " << seconds << "s");
      CHECK(EmbedOne(enc, clip).size() == enc.spec().embedding_dim());
    }
  }
}

TEST_CASE("forward and backward stay finite on random and silent input") {
  for (auto kind : {EncoderKind::kVgg, EncoderKind::kLstm, EncoderKind::kSincNet,
                    EncoderKind::kSincVgg, EncoderKind::kSincLstm}) {
    const Encoder enc(EncoderSpec::Make(kind, Scale::kDesk), 6);
    Waveform silence;
    silence.samples.assign(16000, 0.0f);
    const Waveform noise = Noise(1.0, 5);
    const ClipData a{silence, protoaudio::ExtractFeatures(silence)};
    const ClipData b{noise, protoaudio::ExtractFeatures(noise)};
    Tape<float> tape(/*checked=*/true);
    const auto bound = diff::BindParameters<float>(tape, enc.params(), true);
    INFO(EncoderKindName(kind));
    CHECK_NOTHROW({
      const auto emb = enc.Forward(tape, bound, {&a, &b});
      tape.Backward(diff::Sum(diff::Mul(emb, emb)));
    });
  }
}

TEST_CASE("encoder checkpoints carry and enforce the encoder header") {
  protoaudio::testing::TempDir dir;
  const Encoder vgg(EncoderSpec::Make(EncoderKind::kVgg, Scale::kDesk), 8);
  diff::SaveCheckpoint(dir.file("vgg.ckpt"), vgg.ToCheckpoint({{"val_accuracy", "0.5"}}));
  const diff::Checkpoint ckpt = diff::LoadCheckpoint(dir.file("vgg.ckpt"));
  CHECK(ckpt.header.at("encoder") == "vgg");
  CHECK(ckpt.header.at("scale") == "desk");
  CHECK(ckpt.header.at("embedding_dim") == "384");

  const Encoder back = Encoder::FromCheckpoint(ckpt);
  const ClipData clip = FromFeatures(RandomFeatures(120, 1));
  CHECK(EmbedOne(back, clip) == EmbedOne(vgg, clip));

  Encoder lstm(EncoderSpec::Make(EncoderKind::kLstm, Scale::kDesk), 8);
  try {
    lstm.Restore(ckpt);
    FAIL("vgg checkpoint accepted by lstm");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kCheckpointMismatch);
  }
}
