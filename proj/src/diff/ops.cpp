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

#include "protoaudio/diff/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Core>

namespace protoaudio::diff {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

[[noreturn]] void ShapeError(const std::string& op, const Shape& a, const Shape& b) {
  throw Error(ErrorKind::kShapeMismatch,
              op + ": incompatible shapes " + ShapeString(a) + " and " + ShapeString(b));
}

void RequireRank(const std::string& op, const Shape& s, std::size_t rank) {
  if (s.size() != rank) {
    throw Error(ErrorKind::kShapeMismatch, op + ": expected rank " + std::to_string(rank) +
                                               ", got " + ShapeString(s));
  }
}

template <typename T>
void RequireSame(const std::string& op, const Var<T>& a, const Var<T>& b) {
  if (a.shape() != b.shape()) ShapeError(op, a.shape(), b.shape());
}

// Splits a shape around `axis` into (outer, axis length, inner).
struct AxisSplit {
  std::size_t outer = 1, length = 1, inner = 1;
};

AxisSplit SplitAt(const Shape& s, std::size_t axis) {
  AxisSplit r;
  for (std::size_t i = 0; i < axis; ++i) r.outer *= s[i];
  r.length = s[axis];
  for (std::size_t i = axis + 1; i < s.size(); ++i) r.inner *= s[i];
  return r;
}

template <typename T, typename F, typename D>
Var<T> Unary(const char* op, const Var<T>& a, F f, D dfdx) {
  Tensor<T> out(a.shape());
  const auto& x = a.value().data;
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = f(x[i]);
  return a.tape().Record(op, std::move(out), {a},
                         [a, dfdx](const Tensor<T>& g, auto& grads) {
                           const auto& xv = a.value().data;
                           auto& ga = grads[0]->data;
                           for (std::size_t i = 0; i < xv.size(); ++i) {
                             ga[i] += g.data[i] * dfdx(xv[i]);
                           }
                         });
}

struct ConvGeom {
  std::size_t n, c, h, w;      // input
  std::size_t o, kh, kw;       // weights
  std::size_t sh, sw, ph, pw;  // stride, padding
  std::size_t oh, ow;          // output

  std::size_t patch() const { return c * kh * kw; }
  std::size_t positions() const { return oh * ow; }
};

ConvGeom MakeGeom(const std::string& op, std::size_t n, std::size_t c, std::size_t h,
                  std::size_t w, std::size_t o, std::size_t kh, std::size_t kw, std::size_t sh,
                  std::size_t sw, std::size_t ph, std::size_t pw) {
  if (sh == 0 || sw == 0) throw Error(ErrorKind::kShapeMismatch, op + ": stride must be >= 1");
  if (h + 2 * ph < kh || w + 2 * pw < kw) {
    throw Error(ErrorKind::kShapeMismatch, op + ": kernel larger than padded input");
  }
  ConvGeom g{n, c, h, w, o, kh, kw, sh, sw, ph, pw, 0, 0};
  g.oh = (h + 2 * ph - kh) / sh + 1;
  g.ow = (w + 2 * pw - kw) / sw + 1;
  return g;
}

// cols[(c*kh + i)*kw + j, oy*ow + ox] = x[c, oy*sh + i - ph, ox*sw + j - pw].
template <typename T>
void Im2Col(const T* x, const ConvGeom& g, T* cols) {
  const std::size_t positions = g.positions();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        T* row = cols + ((c * g.kh + i) * g.kw + j) * positions;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.sh + i) -
                                    static_cast<std::ptrdiff_t>(g.ph);
          T* out = row + oy * g.ow;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) {
            std::fill(out, out + g.ow, T(0));
            continue;
          }
          const T* src = x + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.sw + j) -
                                      static_cast<std::ptrdiff_t>(g.pw);
            out[ox] = (ix < 0 || ix >= static_cast<std::ptrdiff_t>(g.w))
                          ? T(0)
                          : src[static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: accumulates cols back into dx.
template <typename T>
void Col2Im(const T* cols, const ConvGeom& g, T* dx) {
  const std::size_t positions = g.positions();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t i = 0; i < g.kh; ++i) {
      for (std::size_t j = 0; j < g.kw; ++j) {
        const T* row = cols + ((c * g.kh + i) * g.kw + j) * positions;
        for (std::size_t oy = 0; oy < g.oh; ++oy) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * g.sh + i) -
                                    static_cast<std::ptrdiff_t>(g.ph);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(g.h)) continue;
          T* dst = dx + (c * g.h + static_cast<std::size_t>(iy)) * g.w;
          for (std::size_t ox = 0; ox < g.ow; ++ox) {
            const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * g.sw + j) -
                                      static_cast<std::ptrdiff_t>(g.pw);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(g.w)) {
              dst[static_cast<std::size_t>(ix)] += row[oy * g.ow + ox];
            }
          }
        }
      }
    }
  }
}

template <typename T>
Var<T> ConvImpl(const char* op, const Var<T>& x, const Var<T>& w,
                const std::optional<Var<T>>& bias, const ConvGeom& g, Shape out_shape) {
  if (bias && bias->shape() != Shape{g.o}) ShapeError(op, bias->shape(), Shape{g.o});

  const std::size_t patch = g.patch(), positions = g.positions();
  const std::size_t in_stride = g.c * g.h * g.w, out_stride = g.o * positions;
  Tensor<T> out(std::move(out_shape));
  std::vector<T> cols(patch * positions);
  ConstMatMap<T> wm(w.value().data.data(), static_cast<Eigen::Index>(g.o),
                    static_cast<Eigen::Index>(patch));
  for (std::size_t n = 0; n < g.n; ++n) {
    Im2Col(x.value().data.data() + n * in_stride, g, cols.data());
    ConstMatMap<T> cm(cols.data(), static_cast<Eigen::Index>(patch),
                      static_cast<Eigen::Index>(positions));
    MatMap<T> om(out.data.data() + n * out_stride, static_cast<Eigen::Index>(g.o),
                 static_cast<Eigen::Index>(positions));
    om.noalias() = wm * cm;
    if (bias) {
      const auto& b = bias->value().data;
      for (std::size_t o = 0; o < g.o; ++o) om.row(static_cast<Eigen::Index>(o)).array() += b[o];
    }
  }

  std::vector<Var<T>> inputs{x, w};
  if (bias) inputs.push_back(*bias);
  return x.tape().Record(
      op, std::move(out), std::move(inputs),
      [x, w, g, patch, positions, in_stride, out_stride](const Tensor<T>& grad, auto& grads) {
        Tensor<T>* gx = grads[0];
        Tensor<T>* gw = grads[1];
        Tensor<T>* gb = grads.size() > 2 ? grads[2] : nullptr;
        std::vector<T> cols(patch * positions);
        ConstMatMap<T> wm(w.value().data.data(), static_cast<Eigen::Index>(g.o),
                          static_cast<Eigen::Index>(patch));
        for (std::size_t n = 0; n < g.n; ++n) {
          ConstMatMap<T> gm(grad.data.data() + n * out_stride, static_cast<Eigen::Index>(g.o),
                            static_cast<Eigen::Index>(positions));
          if (gw) {
            Im2Col(x.value().data.data() + n * in_stride, g, cols.data());
            ConstMatMap<T> cm(cols.data(), static_cast<Eigen::Index>(patch),
                              static_cast<Eigen::Index>(positions));
            MatMap<T> gwm(gw->data.data(), static_cast<Eigen::Index>(g.o),
                          static_cast<Eigen::Index>(patch));
            gwm.noalias() += gm * cm.transpose();
          }
          if (gb) {
            for (std::size_t o = 0; o < g.o; ++o) {
              const T* row = grad.data.data() + n * out_stride + o * positions;
              // Plain loop: Eigen reductions peel by address, which breaks run-to-run determinism.
              gb->data[o] += std::accumulate(row, row + positions, T(0));
            }
          }
          if (gx) {
            MatMap<T> dcols(cols.data(), static_cast<Eigen::Index>(patch),
                            static_cast<Eigen::Index>(positions));
            dcols.noalias() = wm.transpose() * gm;
            Col2Im(cols.data(), g, gx->data.data() + n * in_stride);
          }
        }
      });
}

}  // namespace

template <typename T>
Var<T> Add(const Var<T>& a, const Var<T>& b) {
  RequireSame("add", a, b);
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a.value().data[i] + b.value().data[i];
  return a.tape().Record("add", std::move(out), {a, b}, [](const Tensor<T>& g, auto& grads) {
    for (Tensor<T>* gi : grads) {
      if (!gi) continue;
      for (std::size_t i = 0; i < g.size(); ++i) gi->data[i] += g.data[i];
    }
  });
}

template <typename T>
Var<T> Sub(const Var<T>& a, const Var<T>& b) {
  RequireSame("sub", a, b);
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a.value().data[i] - b.value().data[i];
  return a.tape().Record("sub", std::move(out), {a, b}, [](const Tensor<T>& g, auto& grads) {
    if (grads[0]) {
      for (std::size_t i = 0; i < g.size(); ++i) grads[0]->data[i] += g.data[i];
    }
    if (grads[1]) {
      for (std::size_t i = 0; i < g.size(); ++i) grads[1]->data[i] -= g.data[i];
    }
  });
}

template <typename T>
Var<T> Mul(const Var<T>& a, const Var<T>& b) {
  RequireSame("mul", a, b);
  Tensor<T> out(a.shape());
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = a.value().data[i] * b.value().data[i];
  return a.tape().Record("mul", std::move(out), {a, b}, [a, b](const Tensor<T>& g, auto& grads) {
    if (grads[0]) {
      const auto& bv = b.value().data;
      for (std::size_t i = 0; i < g.size(); ++i) grads[0]->data[i] += g.data[i] * bv[i];
    }
    if (grads[1]) {
      const auto& av = a.value().data;
      for (std::size_t i = 0; i < g.size(); ++i) grads[1]->data[i] += g.data[i] * av[i];
    }
  });
}

template <typename T>
Var<T> AddBias(const Var<T>& x, const Var<T>& bias) {
  const Shape& s = x.shape();
  if (bias.shape().size() != 1 || s.empty() || s.back() != bias.shape()[0]) {
    ShapeError("add_bias", s, bias.shape());
  }
  const std::size_t n = bias.shape()[0];
  Tensor<T> out(s);
  const auto& xv = x.value().data;
  const auto& bv = bias.value().data;
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = xv[i] + bv[i % n];
  return x.tape().Record("add_bias", std::move(out), {x, bias},
                         [n](const Tensor<T>& g, auto& grads) {
                           if (grads[0]) {
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               grads[0]->data[i] += g.data[i];
                             }
                           }
                           if (grads[1]) {
                             for (std::size_t i = 0; i < g.size(); ++i) {
                               grads[1]->data[i % n] += g.data[i];
                             }
                           }
                         });
}

template <typename T>
Var<T> Scale(const Var<T>& a, T s) {
  return Unary<T>("scale", a, [s](T v) { return v * s; }, [s](T) { return s; });
}

template <typename T>
Var<T> AddScalar(const Var<T>& a, T s) {
  return Unary<T>("add_scalar", a, [s](T v) { return v + s; }, [](T) { return T(1); });
}

template <typename T>
Var<T> Relu(const Var<T>& a) {
  return Unary<T>("relu", a, [](T v) { return v > T(0) ? v : T(0); },
                  [](T v) { return v > T(0) ? T(1) : T(0); });
}

template <typename T>
Var<T> Sigmoid(const Var<T>& a) {
  auto sig = [](T v) { return T(1) / (T(1) + std::exp(-v)); };
  return Unary<T>("sigmoid", a, sig, [sig](T v) {
    const T s = sig(v);
    return s * (T(1) - s);
  });
}

template <typename T>
Var<T> Tanh(const Var<T>& a) {
  return Unary<T>("tanh", a, [](T v) { return std::tanh(v); }, [](T v) {
    const T t = std::tanh(v);
    return T(1) - t * t;
  });
}

template <typename T>
Var<T> Abs(const Var<T>& a) {
  return Unary<T>("abs", a, [](T v) { return std::abs(v); },
                  [](T v) { return v > T(0) ? T(1) : (v < T(0) ? T(-1) : T(0)); });
}

template <typename T>
Var<T> Log(const Var<T>& a) {
  return Unary<T>("log", a, [](T v) { return std::log(v); }, [](T v) { return T(1) / v; });
}

template <typename T>
Var<T> Sum(const Var<T>& a) {
  T total = 0;
  for (T v : a.value().data) total += v;
  return a.tape().Record("sum", Tensor<T>::Scalar(total), {a},
                         [](const Tensor<T>& g, auto& grads) {
                           for (T& v : grads[0]->data) v += g.data[0];
                         });
}

template <typename T>
Var<T> Mean(const Var<T>& a, std::size_t axis) {
  const Shape& s = a.shape();
  if (axis >= s.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                "mean: axis " + std::to_string(axis) + " out of range for " + ShapeString(s));
  }
  const AxisSplit sp = SplitAt(s, axis);
  Shape out_shape;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i != axis) out_shape.push_back(s[i]);
  }
  if (out_shape.empty()) out_shape = {1};
  Tensor<T> out(out_shape);
  const auto& x = a.value().data;
  const T inv = T(1) / static_cast<T>(sp.length);
  for (std::size_t o = 0; o < sp.outer; ++o) {
    for (std::size_t l = 0; l < sp.length; ++l) {
      for (std::size_t i = 0; i < sp.inner; ++i) {
        out.data[o * sp.inner + i] += x[(o * sp.length + l) * sp.inner + i];
      }
    }
  }
  for (T& v : out.data) v *= inv;
  return a.tape().Record("mean", std::move(out), {a}, [sp, inv](const Tensor<T>& g, auto& grads) {
    auto& ga = grads[0]->data;
    for (std::size_t o = 0; o < sp.outer; ++o) {
      for (std::size_t l = 0; l < sp.length; ++l) {
        for (std::size_t i = 0; i < sp.inner; ++i) {
          ga[(o * sp.length + l) * sp.inner + i] += g.data[o * sp.inner + i] * inv;
        }
      }
    }
  });
}

template <typename T>
Var<T> MatMul(const Var<T>& a, const Var<T>& b) {
  RequireRank("matmul", a.shape(), 2);
  RequireRank("matmul", b.shape(), 2);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) ShapeError("matmul", a.shape(), b.shape());
  const auto em = static_cast<Eigen::Index>(m), ek = static_cast<Eigen::Index>(k),
             en = static_cast<Eigen::Index>(n);
  Tensor<T> out({m, n});
  MatMap<T>(out.data.data(), em, en).noalias() =
      ConstMatMap<T>(a.value().data.data(), em, ek) * ConstMatMap<T>(b.value().data.data(), ek, en);
  return a.tape().Record("matmul", std::move(out), {a, b},
                         [a, b, em, ek, en](const Tensor<T>& g, auto& grads) {
                           ConstMatMap<T> gm(g.data.data(), em, en);
                           if (grads[0]) {
                             MatMap<T>(grads[0]->data.data(), em, ek).noalias() +=
                                 gm * ConstMatMap<T>(b.value().data.data(), ek, en).transpose();
                           }
                           if (grads[1]) {
                             MatMap<T>(grads[1]->data.data(), ek, en).noalias() +=
                                 ConstMatMap<T>(a.value().data.data(), em, ek).transpose() * gm;
                           }
                         });
}

template <typename T>
Var<T> Transpose(const Var<T>& a) {
  RequireRank("transpose", a.shape(), 2);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  Tensor<T> out({n, m});
  const auto& x = a.value().data;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out.data[j * m + i] = x[i * n + j];
  }
  return a.tape().Record("transpose", std::move(out), {a}, [m, n](const Tensor<T>& g, auto& grads) {
    auto& ga = grads[0]->data;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g.data[j * m + i];
    }
  });
}

template <typename T>
Var<T> Reshape(const Var<T>& a, Shape shape) {
  if (NumElements(shape) != a.size()) ShapeError("reshape", a.shape(), shape);
  Tensor<T> out(std::move(shape), a.value().data);
  return a.tape().Record("reshape", std::move(out), {a}, [](const Tensor<T>& g, auto& grads) {
    for (std::size_t i = 0; i < g.size(); ++i) grads[0]->data[i] += g.data[i];
  });
}

template <typename T>
Var<T> Slice(const Var<T>& a, std::size_t axis, std::size_t start, std::size_t length) {
  const Shape& s = a.shape();
  if (axis >= s.size() || length == 0 || start + length > s[axis]) {
    throw Error(ErrorKind::kShapeMismatch,
                "slice: [" + std::to_string(start) + ", " + std::to_string(start + length) +
                    ") on axis " + std::to_string(axis) + " of " + ShapeString(s));
  }
  const AxisSplit sp = SplitAt(s, axis);
  Shape out_shape = s;
  out_shape[axis] = length;
  Tensor<T> out(out_shape);
  const auto& x = a.value().data;
  for (std::size_t o = 0; o < sp.outer; ++o) {
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>((o * sp.length + start) * sp.inner),
                length * sp.inner,
                out.data.begin() + static_cast<std::ptrdiff_t>(o * length * sp.inner));
  }
  return a.tape().Record("slice", std::move(out), {a},
                         [sp, start, length](const Tensor<T>& g, auto& grads) {
                           auto& ga = grads[0]->data;
                           for (std::size_t o = 0; o < sp.outer; ++o) {
                             for (std::size_t i = 0; i < length * sp.inner; ++i) {
                               ga[(o * sp.length + start) * sp.inner + i] +=
                                   g.data[o * length * sp.inner + i];
                             }
                           }
                         });
}

template <typename T>
Var<T> Concat(const std::vector<Var<T>>& parts, std::size_t axis) {
  if (parts.empty()) throw Error(ErrorKind::kShapeMismatch, "concat: no inputs");
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw Error(ErrorKind::kShapeMismatch, "concat: axis out of range for " + ShapeString(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> offsets;
  for (const Var<T>& p : parts) {
    Shape probe = p.shape();
    if (probe.size() != first.size()) ShapeError("concat", first, probe);
    for (std::size_t i = 0; i < probe.size(); ++i) {
      if (i != axis && probe[i] != first[i]) ShapeError("concat", first, probe);
    }
    offsets.push_back(out_shape[axis]);
    out_shape[axis] += probe[axis];
  }
  const AxisSplit total = SplitAt(out_shape, axis);
  Tensor<T> out(out_shape);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const std::size_t len = parts[p].shape()[axis];
    const auto& x = parts[p].value().data;
    for (std::size_t o = 0; o < total.outer; ++o) {
      std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(o * len * total.inner), len * total.inner,
                  out.data.begin() + static_cast<std::ptrdiff_t>(
                                         (o * total.length + offsets[p]) * total.inner));
    }
  }
  std::vector<std::size_t> lengths;
  for (const Var<T>& p : parts) lengths.push_back(p.shape()[axis]);
  return parts[0].tape().Record(
      "concat", std::move(out), parts,
      [total, offsets, lengths](const Tensor<T>& g, auto& grads) {
        for (std::size_t p = 0; p < grads.size(); ++p) {
          if (!grads[p]) continue;
          auto& gp = grads[p]->data;
          const std::size_t len = lengths[p];
          for (std::size_t o = 0; o < total.outer; ++o) {
            for (std::size_t i = 0; i < len * total.inner; ++i) {
              gp[o * len * total.inner + i] +=
                  g.data[(o * total.length + offsets[p]) * total.inner + i];
            }
          }
        }
      });
}

template <typename T>
Var<T> Conv1d(const Var<T>& x, const Var<T>& w, const std::optional<Var<T>>& bias,
              std::size_t stride, std::size_t padding) {
  RequireRank("conv1d", x.shape(), 3);
  RequireRank("conv1d", w.shape(), 3);
  if (w.shape()[1] != x.shape()[1]) ShapeError("conv1d", x.shape(), w.shape());
  const ConvGeom g = MakeGeom("conv1d", x.shape()[0], x.shape()[1], 1, x.shape()[2], w.shape()[0],
                              1, w.shape()[2], 1, stride, 0, padding);
  return ConvImpl<T>("conv1d", x, w, bias, g, Shape{g.n, g.o, g.ow});
}

template <typename T>
Var<T> Conv2d(const Var<T>& x, const Var<T>& w, const std::optional<Var<T>>& bias,
              std::size_t stride, std::size_t padding) {
  RequireRank("conv2d", x.shape(), 4);
  RequireRank("conv2d", w.shape(), 4);
  if (w.shape()[1] != x.shape()[1]) ShapeError("conv2d", x.shape(), w.shape());
  const ConvGeom g = MakeGeom("conv2d", x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3],
                              w.shape()[0], w.shape()[2], w.shape()[3], stride, stride, padding,
                              padding);
  return ConvImpl<T>("conv2d", x, w, bias, g, Shape{g.n, g.o, g.oh, g.ow});
}

template <typename T>
Var<T> MaxPool2d(const Var<T>& x, std::size_t kernel_h, std::size_t kernel_w,
                 std::size_t stride_h, std::size_t stride_w) {
  RequireRank("max_pool2d", x.shape(), 4);
  const Shape& s = x.shape();
  if (kernel_h == 0 || kernel_w == 0 || stride_h == 0 || stride_w == 0 || kernel_h > s[2] ||
      kernel_w > s[3]) {
    throw Error(ErrorKind::kShapeMismatch, "max_pool2d: window does not fit " + ShapeString(s));
  }
  const std::size_t planes = s[0] * s[1], h = s[2], w = s[3];
  const std::size_t oh = (h - kernel_h) / stride_h + 1, ow = (w - kernel_w) / stride_w + 1;
  Tensor<T> out({s[0], s[1], oh, ow});
  auto argmax = std::make_shared<std::vector<std::size_t>>(out.size());
  const auto& xv = x.value().data;
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        std::size_t best = p * h * w + oy * stride_h * w + ox * stride_w;
        for (std::size_t i = 0; i < kernel_h; ++i) {
          for (std::size_t j = 0; j < kernel_w; ++j) {
            const std::size_t idx = p * h * w + (oy * stride_h + i) * w + ox * stride_w + j;
            if (xv[idx] > xv[best]) best = idx;
          }
        }
        const std::size_t o = (p * oh + oy) * ow + ox;
        out.data[o] = xv[best];
        (*argmax)[o] = best;
      }
    }
  }
  return x.tape().Record("max_pool2d", std::move(out), {x},
                         [argmax](const Tensor<T>& g, auto& grads) {
                           auto& gx = grads[0]->data;
                           for (std::size_t o = 0; o < g.size(); ++o) gx[(*argmax)[o]] += g.data[o];
                         });
}

template <typename T>
Var<T> Softmax(const Var<T>& a) {
  const Shape& s = a.shape();
  const std::size_t k = s.back(), rows = a.size() / k;
  Tensor<T> out(s);
  const auto& x = a.value().data;
  for (std::size_t r = 0; r < rows; ++r) {
    const T* in = x.data() + r * k;
    T* y = out.data.data() + r * k;
    const T m = *std::max_element(in, in + k);
    T z = 0;
    for (std::size_t j = 0; j < k; ++j) z += (y[j] = std::exp(in[j] - m));
    for (std::size_t j = 0; j < k; ++j) y[j] /= z;
  }
  Tape<T>& tape = a.tape();
  const std::size_t out_id = tape.size();
  return tape.Record("softmax", std::move(out), {a},
                     [&tape, out_id, rows, k](const Tensor<T>& g, auto& grads) {
                       const auto& y = tape.value(out_id).data;
                       auto& ga = grads[0]->data;
                       for (std::size_t r = 0; r < rows; ++r) {
                         T dot = 0;
                         for (std::size_t j = 0; j < k; ++j) dot += g.data[r * k + j] * y[r * k + j];
                         for (std::size_t j = 0; j < k; ++j) {
                           ga[r * k + j] += y[r * k + j] * (g.data[r * k + j] - dot);
                         }
                       }
                     });
}

template <typename T>
Var<T> SquaredEuclidean(const Var<T>& a, const Var<T>& b) {
  RequireRank("squared_euclidean", a.shape(), 2);
  RequireRank("squared_euclidean", b.shape(), 2);
  const std::size_t m = a.shape()[0], n = b.shape()[0], d = a.shape()[1];
  if (b.shape()[1] != d) ShapeError("squared_euclidean", a.shape(), b.shape());
  Tensor<T> out({m, n});
  const auto& av = a.value().data;
  const auto& bv = b.value().data;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      T acc = 0;
      for (std::size_t c = 0; c < d; ++c) {
        const T diff = av[i * d + c] - bv[j * d + c];
        acc += diff * diff;
      }
      out.data[i * n + j] = acc;
    }
  }
  return a.tape().Record(
      "squared_euclidean", std::move(out), {a, b}, [a, b, m, n, d](const Tensor<T>& g, auto& grads) {
        const auto& av = a.value().data;
        const auto& bv = b.value().data;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const T gij = T(2) * g.data[i * n + j];
            for (std::size_t c = 0; c < d; ++c) {
              const T diff = av[i * d + c] - bv[j * d + c];
              if (grads[0]) grads[0]->data[i * d + c] += gij * diff;
              if (grads[1]) grads[1]->data[j * d + c] -= gij * diff;
            }
          }
        }
      });
}

template <typename T>
Var<T> CrossEntropy(const Var<T>& logits, const std::vector<std::size_t>& labels) {
  RequireRank("cross_entropy", logits.shape(), 2);
  const std::size_t m = logits.shape()[0], k = logits.shape()[1];
  if (labels.size() != m) {
    throw Error(ErrorKind::kShapeMismatch, "cross_entropy: " + std::to_string(labels.size()) +
                                               " labels for logits " + ShapeString(logits.shape()));
  }
  const auto& x = logits.value().data;
  auto probs = std::make_shared<std::vector<T>>(m * k);
  T total = 0;
  for (std::size_t r = 0; r < m; ++r) {
    if (labels[r] >= k) {
      throw Error(ErrorKind::kShapeMismatch, "cross_entropy: label " + std::to_string(labels[r]) +
                                                 " out of range for " + std::to_string(k) +
                                                 " classes");
    }
    const T* row = x.data() + r * k;
    const T mx = *std::max_element(row, row + k);
    T z = 0;
    for (std::size_t j = 0; j < k; ++j) z += std::exp(row[j] - mx);
    const T lse = mx + std::log(z);
    for (std::size_t j = 0; j < k; ++j) (*probs)[r * k + j] = std::exp(row[j] - lse);
    total += lse - row[labels[r]];
  }
  return logits.tape().Record(
      "cross_entropy", Tensor<T>::Scalar(total / static_cast<T>(m)), {logits},
      [probs, labels, m, k](const Tensor<T>& g, auto& grads) {
        auto& gl = grads[0]->data;
        const T scale = g.data[0] / static_cast<T>(m);
        for (std::size_t r = 0; r < m; ++r) {
          for (std::size_t j = 0; j < k; ++j) {
            const T target = j == labels[r] ? T(1) : T(0);
            gl[r * k + j] += scale * ((*probs)[r * k + j] - target);
          }
        }
      });
}

#define PROTOAUDIO_INSTANTIATE_OPS(T)                                                     \
  template Var<T> Add(const Var<T>&, const Var<T>&);                                      \
  template Var<T> Sub(const Var<T>&, const Var<T>&);                                      \
  template Var<T> Mul(const Var<T>&, const Var<T>&);                                      \
  template Var<T> AddBias(const Var<T>&, const Var<T>&);                                  \
  template Var<T> Scale(const Var<T>&, T);                                                \
  template Var<T> AddScalar(const Var<T>&, T);                                            \
  template Var<T> Relu(const Var<T>&);                                                    \
  template Var<T> Sigmoid(const Var<T>&);                                                 \
  template Var<T> Tanh(const Var<T>&);                                                    \
  template Var<T> Abs(const Var<T>&);                                                     \
  template Var<T> Log(const Var<T>&);                                                     \
  template Var<T> Sum(const Var<T>&);                                                     \
  template Var<T> Mean(const Var<T>&, std::size_t);                                       \
  template Var<T> MatMul(const Var<T>&, const Var<T>&);                                   \
  template Var<T> Transpose(const Var<T>&);                                               \
  template Var<T> Reshape(const Var<T>&, Shape);                                          \
  template Var<T> Slice(const Var<T>&, std::size_t, std::size_t, std::size_t);            \
  template Var<T> Concat(const std::vector<Var<T>>&, std::size_t);                        \
  template Var<T> Conv1d(const Var<T>&, const Var<T>&, const std::optional<Var<T>>&,      \
                         std::size_t, std::size_t);                                       \
  template Var<T> Conv2d(const Var<T>&, const Var<T>&, const std::optional<Var<T>>&,      \
                         std::size_t, std::size_t);                                       \
  template Var<T> MaxPool2d(const Var<T>&, std::size_t, std::size_t, std::size_t,         \
                            std::size_t);                                                 \
  template Var<T> Softmax(const Var<T>&);                                                 \
  template Var<T> SquaredEuclidean(const Var<T>&, const Var<T>&);                         \
  template Var<T> CrossEntropy(const Var<T>&, const std::vector<std::size_t>&);

PROTOAUDIO_INSTANTIATE_OPS(float)
PROTOAUDIO_INSTANTIATE_OPS(double)

#undef PROTOAUDIO_INSTANTIATE_OPS

}  // namespace protoaudio::diff
