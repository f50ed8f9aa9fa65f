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

#include "protoaudio/encoders/sinc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/error.hpp"

namespace protoaudio::encoders {
namespace {

// Derivatives of the clamped cutoffs w.r.t. the raw parameters.
struct CutoffJacobian {
  double df1_dlow = 0.0;
  double df2_dlow = 0.0;
  double df2_dband = 0.0;
};

CutoffJacobian CutoffDerivatives(double theta_low, double theta_band, double sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  const double sign_low = theta_low > 0 ? 1.0 : (theta_low < 0 ? -1.0 : 0.0);
  const double sign_band = theta_band > 0 ? 1.0 : (theta_band < 0 ? -1.0 : 0.0);
  CutoffJacobian j;
  const bool low_free = std::abs(theta_low) < nyquist - kSincMinBandHz;
  j.df1_dlow = low_free ? sign_low : 0.0;
  const SincCutoffs c = EffectiveCutoffs(theta_low, theta_band, sample_rate_hz);
  const bool band_free = std::abs(theta_band) > kSincMinBandHz;
  const bool top_free = c.f1_hz + std::max(std::abs(theta_band), kSincMinBandHz) < nyquist;
  if (top_free) {
    j.df2_dlow = j.df1_dlow;
    j.df2_dband = band_free ? sign_band : 0.0;
  }
  return j;
}

void CheckKernelLen(std::size_t kernel_len) {
  if (kernel_len == 0 || kernel_len % 2 == 0) {
    throw Error(ErrorKind::kConfig,
                "sinc kernel length must be odd, got " + std::to_string(kernel_len));
  }
}

}  // namespace

SincCutoffs EffectiveCutoffs(double theta_low, double theta_band, double sample_rate_hz) {
  const double nyquist = sample_rate_hz / 2.0;
  SincCutoffs c;
  c.f1_hz = std::min(std::abs(theta_low), nyquist - kSincMinBandHz);
  c.f2_hz = std::min(c.f1_hz + std::max(std::abs(theta_band), kSincMinBandHz), nyquist);
  return c;
}

SincLayerParams SincInitMel(std::size_t n_filters, double sample_rate_hz,
                            std::size_t kernel_len) {
  if (n_filters < 2) {
    throw Error(ErrorKind::kConfig,
                "sinc layer needs at least 2 filters, got " + std::to_string(n_filters));
  }
  CheckKernelLen(kernel_len);
  const double top = sample_rate_hz / 2.0 - kSincInitTopMarginHz;
  if (top <= kSincInitLowHz) {
    throw Error(ErrorKind::kConfig, "sample rate too low for sinc initialization");
  }
  const double mel_lo = HzToMel(kSincInitLowHz);
  const double mel_hi = HzToMel(top);
  std::vector<double> edges(n_filters + 1);
  for (std::size_t i = 0; i <= n_filters; ++i) {
    const double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) / n_filters;
    edges[i] = MelToHz(mel);
  }
  edges.front() = kSincInitLowHz;
  edges.back() = top;

  SincLayerParams p;
  p.kernel_len = kernel_len;
  p.sample_rate_hz = sample_rate_hz;
  for (std::size_t i = 0; i < n_filters; ++i) {
    p.theta_low.push_back(edges[i]);
    p.theta_band.push_back(edges[i + 1] - edges[i]);
  }
  return p;
}

double SincBandCenterHz(const SincCutoffs& c) {
  return MelToHz(0.5 * (HzToMel(c.f1_hz) + HzToMel(c.f2_hz)));
}

std::vector<double> SincKernel(const SincCutoffs& c, std::size_t kernel_len,
                               double sample_rate_hz) {
  CheckKernelLen(kernel_len);
  const double f1 = c.f1_hz / sample_rate_hz;
  const double f2 = c.f2_hz / sample_rate_hz;
  const auto half = static_cast<std::ptrdiff_t>(kernel_len / 2);
  std::vector<double> g(kernel_len);
  for (std::size_t m = 0; m < kernel_len; ++m) {
    const double n = static_cast<double>(static_cast<std::ptrdiff_t>(m) - half);
    double v;
    if (n == 0.0) {
      v = 2.0 * f2 - 2.0 * f1;
    } else {
      const double pn = std::numbers::pi * n;
      v = (std::sin(2.0 * pn * f2) - std::sin(2.0 * pn * f1)) / pn;
    }
    g[m] = v * HammingWeight(m, kernel_len);
  }
  return g;
}

template <typename T>
diff::Var<T> SincFilterBank(const diff::Var<T>& theta_low, const diff::Var<T>& theta_band,
                            std::size_t kernel_len, double sample_rate_hz) {
  CheckKernelLen(kernel_len);
  if (theta_low.shape().size() != 1 || theta_low.shape() != theta_band.shape()) {
    throw Error(ErrorKind::kShapeMismatch,
                "sinc_filter_bank: parameter shapes " + diff::ShapeString(theta_low.shape()) +
                    " and " + diff::ShapeString(theta_band.shape()));
  }
  const std::size_t filters = theta_low.shape()[0];
  diff::Tensor<T> out({filters, 1, kernel_len});
  for (std::size_t f = 0; f < filters; ++f) {
    const SincCutoffs c = EffectiveCutoffs(static_cast<double>(theta_low.value().data[f]),
                                           static_cast<double>(theta_band.value().data[f]),
                                           sample_rate_hz);
    const std::vector<double> g = SincKernel(c, kernel_len, sample_rate_hz);
    for (std::size_t m = 0; m < kernel_len; ++m) out.data[f * kernel_len + m] = static_cast<T>(g[m]);
  }

  return theta_low.tape().Record(
      "sinc_filter_bank", std::move(out), {theta_low, theta_band},
      [theta_low, theta_band, kernel_len, sample_rate_hz, filters](const diff::Tensor<T>& grad,
                                                                   auto& grads) {
        const auto half = static_cast<std::ptrdiff_t>(kernel_len / 2);
        for (std::size_t f = 0; f < filters; ++f) {
          const double tl = static_cast<double>(theta_low.value().data[f]);
          const double tb = static_cast<double>(theta_band.value().data[f]);
          const SincCutoffs c = EffectiveCutoffs(tl, tb, sample_rate_hz);
          const CutoffJacobian jac = CutoffDerivatives(tl, tb, sample_rate_hz);
          // d g[n] / d f (normalized) = +-2 cos(2 pi f n) w[n].
          double dl_df1 = 0.0, dl_df2 = 0.0;
          for (std::size_t m = 0; m < kernel_len; ++m) {
            const double n = static_cast<double>(static_cast<std::ptrdiff_t>(m) - half);
            const double gw = static_cast<double>(grad.data[f * kernel_len + m]) *
                              HammingWeight(m, kernel_len) * 2.0;
            const double w1 = 2.0 * std::numbers::pi * n * c.f1_hz / sample_rate_hz;
            const double w2 = 2.0 * std::numbers::pi * n * c.f2_hz / sample_rate_hz;
            dl_df2 += gw * std::cos(w2);
            dl_df1 -= gw * std::cos(w1);
          }
          dl_df1 /= sample_rate_hz;
          dl_df2 /= sample_rate_hz;
          if (grads[0]) {
            grads[0]->data[f] += static_cast<T>(dl_df1 * jac.df1_dlow + dl_df2 * jac.df2_dlow);
          }
          if (grads[1]) grads[1]->data[f] += static_cast<T>(dl_df2 * jac.df2_dband);
        }
      });
}

template diff::Var<float> SincFilterBank(const diff::Var<float>&, const diff::Var<float>&,
                                         std::size_t, double);
template diff::Var<double> SincFilterBank(const diff::Var<double>&, const diff::Var<double>&,
                                          std::size_t, double);

}  // namespace protoaudio::encoders
