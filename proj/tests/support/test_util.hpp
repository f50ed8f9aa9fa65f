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

// Shared test helpers. Oracles here are deliberately naive and independent of
// the library code paths they check.

#ifndef PROTOAUDIO_TESTS_TEST_UTIL_HPP_
#define PROTOAUDIO_TESTS_TEST_UTIL_HPP_

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "protoaudio/diff/ops.hpp"
#include "protoaudio/diff/tape.hpp"

namespace protoaudio::testing {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("protoaudio_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// O(N^2) DFT magnitude-squared, first n/2+1 bins, no normalization.
inline std::vector<double> NaiveDftPower(const std::vector<double>& x, std::size_t n) {
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < std::min(n, x.size()); ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * t) / n;
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = std::norm(acc);
  }
  return out;
}

inline std::vector<double> RandomVector(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                                        double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

// Builds a scalar loss from inputs bound as leaves on a fresh tape.
using LossFn = std::function<diff::Var<double>(diff::Tape<double>&,
                                               const std::vector<diff::Var<double>>&)>;

struct GradcheckResult {
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
  bool ok = true;
};

// Central finite differences (step h) against the tape's analytic gradients.
// An entry passes if its relative error is below rel_tol or its absolute error
// is below abs_tol.
inline GradcheckResult Gradcheck(const LossFn& fn, const std::vector<diff::Tensor<double>>& inputs,
                                 double h = 1e-5, double rel_tol = 1e-4, double abs_tol = 1e-6) {
  std::vector<diff::Tensor<double>> analytic;
  {
    diff::Tape<double> tape(/*checked=*/true);
    std::vector<diff::Var<double>> vars;
    for (const auto& t : inputs) vars.push_back(tape.Leaf(t, true));
    auto loss = fn(tape, vars);
    auto grads = tape.Backward(loss);
    for (const auto& v : vars) analytic.push_back(grads[v]);
  }
  auto evaluate = [&](const std::vector<diff::Tensor<double>>& values) {
    diff::Tape<double> tape;
    std::vector<diff::Var<double>> vars;
    for (const auto& t : values) vars.push_back(tape.Leaf(t, false));
    return fn(tape, vars).value().item();
  };

  GradcheckResult result;
  std::vector<diff::Tensor<double>> probe = inputs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      const double orig = probe[i].data[j];
      probe[i].data[j] = orig + h;
      const double up = evaluate(probe);
      probe[i].data[j] = orig - h;
      const double down = evaluate(probe);
      probe[i].data[j] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[i].data[j];
      const double abs_err = std::abs(numeric - a);
      const double rel_err = abs_err / std::max(std::abs(numeric), std::abs(a));
      const bool entry_ok = abs_err < abs_tol || rel_err < rel_tol;
      if (!entry_ok) result.ok = false;
      result.max_abs_error = std::max(result.max_abs_error, abs_err);
      if (abs_err >= abs_tol) result.max_rel_error = std::max(result.max_rel_error, rel_err);
    }
  }
  return result;
}

// Contracts an op output with fixed random weights so every output entry
// contributes to the scalar loss.
inline diff::Var<double> WeightedSum(diff::Tape<double>& tape, const diff::Var<double>& y,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  diff::Tensor<double> w(y.shape(), RandomVector(y.size(), rng));
  return diff::Sum(diff::Mul(y, tape.Constant(std::move(w))));
}

}  // namespace protoaudio::testing

#endif  // PROTOAUDIO_TESTS_TEST_UTIL_HPP_
