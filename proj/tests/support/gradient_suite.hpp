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

// Finite-difference checks for every differentiable operator, on randomly
// shaped instances. Shared by the unit tests and the acceptance runner.

#ifndef PROTOAUDIO_TESTS_GRADIENT_SUITE_HPP_
#define PROTOAUDIO_TESTS_GRADIENT_SUITE_HPP_

#include <numeric>
#include <string>
#include <vector>

#include "protoaudio/encoders/sinc.hpp"
#include "test_util.hpp"

namespace protoaudio::testing {

struct OpGradReport {
  std::string op;
  int instances = 0;
  int failures = 0;
  double worst_rel_error = 0.0;
};

namespace gradsuite {

using diff::Shape;
using diff::Tape;
using diff::Tensor;
using diff::Var;
using Vars = std::vector<Var<double>>;

inline std::size_t Dim(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Tensor<double> Rand(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  const std::size_t n = diff::NumElements(s);
  return Tensor<double>(std::move(s), RandomVector(n, rng, lo, hi));
}

// Values bounded away from zero, for ops with a kink there.
inline Tensor<double> RandAwayFromZero(Shape s, std::mt19937_64& rng) {
  Tensor<double> t = Rand(std::move(s), rng, 0.05, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (double& v : t.data) {
    if (flip(rng)) v = -v;
  }
  return t;
}

// Distinct values on a 0.01 grid, so max-pool winners are stable under h.
inline Tensor<double> RandDistinct(Shape s, std::mt19937_64& rng) {
  const std::size_t n = diff::NumElements(s);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Tensor<double> t(std::move(s));
  for (std::size_t i = 0; i < n; ++i) t.data[i] = 0.01 * static_cast<double>(order[i]) - 0.5;
  return t;
}

inline Shape RandShape(std::mt19937_64& rng) {
  Shape s(Dim(rng, 1, 3));
  for (auto& d : s) d = Dim(rng, 1, 4);
  return s;
}

struct Case {
  LossFn fn;
  std::vector<Tensor<double>> inputs;
};

using Generator = std::function<Case(std::mt19937_64&, std::uint64_t)>;

inline std::vector<std::pair<std::string, Generator>> Generators() {
  std::vector<std::pair<std::string, Generator>> g;
  auto elementwise = [](auto op) {
    return [op](std::mt19937_64& rng, std::uint64_t seed) {
      const Shape s = RandShape(rng);
      return Case{[op, seed](Tape<double>& t, const Vars& v) {
                    return WeightedSum(t, op(v[0], v[1]), seed);
                  },
                  {Rand(s, rng), Rand(s, rng)}};
    };
  };
  g.emplace_back("add", elementwise([](auto a, auto b) { return diff::Add(a, b); }));
  g.emplace_back("sub", elementwise([](auto a, auto b) { return diff::Sub(a, b); }));
  g.emplace_back("mul", elementwise([](auto a, auto b) { return diff::Mul(a, b); }));
  g.emplace_back("add_bias", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 5), n = Dim(rng, 1, 5);
    return Case{[seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::AddBias(v[0], v[1]), seed);
                },
                {Rand({m, n}, rng), Rand({n}, rng)}};
  });
  auto unary = [](auto op, auto make) {
    return [op, make](std::mt19937_64& rng, std::uint64_t seed) {
      return Case{[op, seed](Tape<double>& t, const Vars& v) {
                    return WeightedSum(t, op(v[0]), seed);
                  },
                  {make(RandShape(rng), rng)}};
    };
  };
  auto plain = [](Shape s, std::mt19937_64& rng) { return Rand(std::move(s), rng, -2.0, 2.0); };
  g.emplace_back("scale", [](std::mt19937_64& rng, std::uint64_t seed) {
    const double s = RandomVector(1, rng)[0] * 3.0;
    return Case{[s, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Scale(v[0], s), seed);
                },
                {Rand(RandShape(rng), rng)}};
  });
  g.emplace_back("add_scalar", [](std::mt19937_64& rng, std::uint64_t seed) {
    const double s = RandomVector(1, rng)[0] * 3.0;
    return Case{[s, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::AddScalar(v[0], s), seed);
                },
                {Rand(RandShape(rng), rng)}};
  });
  g.emplace_back("relu", unary([](auto a) { return diff::Relu(a); }, RandAwayFromZero));
  g.emplace_back("abs", unary([](auto a) { return diff::Abs(a); }, RandAwayFromZero));
  g.emplace_back("sigmoid", unary([](auto a) { return diff::Sigmoid(a); }, plain));
  g.emplace_back("tanh", unary([](auto a) { return diff::Tanh(a); }, plain));
  g.emplace_back("log", unary([](auto a) { return diff::Log(a); },
                              [](Shape s, std::mt19937_64& rng) {
                                return Rand(std::move(s), rng, 0.2, 2.0);
                              }));
  g.emplace_back("sum", [](std::mt19937_64& rng, std::uint64_t) {
    return Case{[](Tape<double>&, const Vars& v) { return diff::Sum(v[0]); },
                {Rand(RandShape(rng), rng)}};
  });
  g.emplace_back("mean", [](std::mt19937_64& rng, std::uint64_t seed) {
    const Shape s = RandShape(rng);
    const std::size_t axis = Dim(rng, 0, s.size() - 1);
    return Case{[axis, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Mean(v[0], axis), seed);
                },
                {Rand(s, rng)}};
  });
  g.emplace_back("matmul", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 5), k = Dim(rng, 1, 5), n = Dim(rng, 1, 5);
    return Case{[seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::MatMul(v[0], v[1]), seed);
                },
                {Rand({m, k}, rng), Rand({k, n}, rng)}};
  });
  g.emplace_back("transpose", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 5), n = Dim(rng, 1, 5);
    return Case{[seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Transpose(v[0]), seed);
                },
                {Rand({m, n}, rng)}};
  });
  g.emplace_back("reshape", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 4), n = Dim(rng, 1, 4);
    return Case{[m, n, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Reshape(v[0], {n, m}), seed);
                },
                {Rand({m, n}, rng)}};
  });
  g.emplace_back("slice", [](std::mt19937_64& rng, std::uint64_t seed) {
    const Shape s = RandShape(rng);
    const std::size_t axis = Dim(rng, 0, s.size() - 1);
    const std::size_t start = Dim(rng, 0, s[axis] - 1);
    const std::size_t len = Dim(rng, 1, s[axis] - start);
    return Case{[axis, start, len, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Slice(v[0], axis, start, len), seed);
                },
                {Rand(s, rng)}};
  });
  g.emplace_back("concat", [](std::mt19937_64& rng, std::uint64_t seed) {
    Shape a = RandShape(rng);
    const std::size_t axis = Dim(rng, 0, a.size() - 1);
    Shape b = a;
    b[axis] = Dim(rng, 1, 3);
    return Case{[axis, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Concat<double>({v[0], v[1], v[0]}, axis), seed);
                },
                {Rand(a, rng), Rand(b, rng)}};
  });
  g.emplace_back("conv1d", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t n = Dim(rng, 1, 2), c = Dim(rng, 1, 3), o = Dim(rng, 1, 3);
    const std::size_t k = Dim(rng, 1, 4), stride = Dim(rng, 1, 3), pad = Dim(rng, 0, 2);
    const std::size_t len = Dim(rng, k, k + 6);
    return Case{[stride, pad, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Conv1d<double>(v[0], v[1], v[2], stride, pad), seed);
                },
                {Rand({n, c, len}, rng), Rand({o, c, k}, rng), Rand({o}, rng)}};
  });
  g.emplace_back("conv2d", [](std::mt19937_64& rng, std::uint64_t seed) {
    // The first instance is the canonical 3x5x5 input with two 3x3 filters.
    const bool canonical = seed % 10 == 0;
    const std::size_t n = canonical ? 1 : Dim(rng, 1, 2);
    const std::size_t c = canonical ? 3 : Dim(rng, 1, 3);
    const std::size_t o = canonical ? 2 : Dim(rng, 1, 3);
    const std::size_t k = canonical ? 3 : Dim(rng, 1, 3);
    const std::size_t stride = canonical ? 1 : Dim(rng, 1, 2);
    const std::size_t pad = canonical ? 1 : Dim(rng, 0, 1);
    const std::size_t h = canonical ? 5 : Dim(rng, k, k + 3);
    const std::size_t w = canonical ? 5 : Dim(rng, k, k + 3);
    return Case{[stride, pad, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Conv2d<double>(v[0], v[1], v[2], stride, pad), seed);
                },
                {Rand({n, c, h, w}, rng), Rand({o, c, k, k}, rng), Rand({o}, rng)}};
  });
  g.emplace_back("max_pool2d", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t n = Dim(rng, 1, 2), c = Dim(rng, 1, 2);
    const std::size_t kh = Dim(rng, 1, 3), kw = Dim(rng, 1, 3);
    const std::size_t sh = Dim(rng, 1, 3), sw = Dim(rng, 1, 3);
    const std::size_t h = Dim(rng, kh, kh + 4), w = Dim(rng, kw, kw + 4);
    return Case{[kh, kw, sh, sw, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::MaxPool2d(v[0], kh, kw, sh, sw), seed);
                },
                {RandDistinct({n, c, h, w}, rng)}};
  });
  g.emplace_back("softmax", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 4), k = Dim(rng, 2, 6);
    return Case{[seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::Softmax(v[0]), seed);
                },
                {Rand({m, k}, rng, -3.0, 3.0)}};
  });
  g.emplace_back("squared_euclidean", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t m = Dim(rng, 1, 5), n = Dim(rng, 1, 5), d = Dim(rng, 1, 6);
    return Case{[seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, diff::SquaredEuclidean(v[0], v[1]), seed);
                },
                {Rand({m, d}, rng), Rand({n, d}, rng)}};
  });
  g.emplace_back("cross_entropy", [](std::mt19937_64& rng, std::uint64_t) {
    const std::size_t m = Dim(rng, 1, 6), k = Dim(rng, 2, 6);
    std::vector<std::size_t> labels(m);
    for (auto& l : labels) l = Dim(rng, 0, k - 1);
    return Case{[labels](Tape<double>&, const Vars& v) {
                  return diff::CrossEntropy(v[0], labels);
                },
                {Rand({m, k}, rng, -4.0, 4.0)}};
  });
  g.emplace_back("sinc_filter_bank", [](std::mt19937_64& rng, std::uint64_t seed) {
    const std::size_t filters = Dim(rng, 1, 4);
    const std::size_t kernel = 2 * Dim(rng, 2, 12) + 1;
    // Cutoffs in Hz, kept away from the clamp boundaries.
    Tensor<double> low = Rand({filters}, rng, 40.0, 3000.0);
    Tensor<double> band = Rand({filters}, rng, 60.0, 2000.0);
    return Case{[kernel, seed](Tape<double>& t, const Vars& v) {
                  return WeightedSum(t, encoders::SincFilterBank(v[0], v[1], kernel, 16000.0),
                                     seed);
                },
                {low, band}};
  });
  return g;
}

}  // namespace gradsuite

// Runs `instances` random cases per operator.
inline std::vector<OpGradReport> RunGradientSuite(int instances = 10) {
  std::vector<OpGradReport> reports;
  std::uint64_t op_index = 0;
  for (const auto& [name, gen] : gradsuite::Generators()) {
    OpGradReport r;
    r.op = name;
    for (int i = 0; i < instances; ++i) {
      const std::uint64_t seed = op_index * 1000 + static_cast<std::uint64_t>(i) * 10;
      std::mt19937_64 rng(seed + 7);
      const gradsuite::Case c = gen(rng, seed);
      const GradcheckResult res = Gradcheck(c.fn, c.inputs);
      r.instances += 1;
      if (!res.ok) r.failures += 1;
      r.worst_rel_error = std::max(r.worst_rel_error, res.max_rel_error);
    }
    reports.push_back(r);
    ++op_index;
  }
  return reports;
}

}  // namespace protoaudio::testing

#endif  // PROTOAUDIO_TESTS_GRADIENT_SUITE_HPP_
