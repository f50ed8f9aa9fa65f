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

#include "protoaudio/datasetkit/splits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "protoaudio/error.hpp"

namespace protoaudio::datasetkit {

std::vector<std::size_t> Apportion(std::size_t total, const std::vector<double>& ratios) {
  std::vector<std::size_t> out(ratios.size());
  std::vector<double> frac(ratios.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double quota = ratios[i] * static_cast<double>(total);
    // The epsilon keeps 0.6 * 10 from flooring to 5.
    out[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    frac[i] = quota - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(ratios.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) out[order[i % order.size()]] += 1;
  return out;
}

SplitRatios ParseRatios(const std::string& text) {
  std::stringstream ss(text);
  std::vector<double> v;
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kConfig, "split ratios must be three numbers, got '" + text + "'");
    }
  }
  if (v.size() != 3) {
    throw Error(ErrorKind::kConfig, "split ratios must be three numbers, got '" + text + "'");
  }
  return {v[0], v[1], v[2]};
}

std::string FormatRatios(const SplitRatios& r) {
  std::ostringstream os;
  os << r.train << "," << r.val << "," << r.test;
  return os.str();
}

FewShotSplit MakeSplits(const Manifest& m, const SplitRatios& ratios, std::size_t min_per_class,
                        std::uint64_t seed) {
  const std::vector<double> rv = {ratios.train, ratios.val, ratios.test};
  for (double r : rv) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      throw Error(ErrorKind::kConfig, "split ratios must be non-negative");
    }
  }
  if (std::abs(rv[0] + rv[1] + rv[2] - 1.0) > 1e-6) {
    throw Error(ErrorKind::kConfig, "split ratios must sum to 1, got " + FormatRatios(ratios));
  }
  if (!m.single_label()) {
    throw Error(ErrorKind::kConfig, "splits need a single-label manifest");
  }

  std::map<std::string, std::size_t> counts;
  for (const auto& e : m.entries) counts[e.labels[0]] += 1;
  FewShotSplit split;
  split.seed = seed;
  split.ratios = ratios;
  split.min_per_class = min_per_class;
  std::vector<std::string> qualifying;
  for (const auto& [id, n] : counts) {
    (n >= min_per_class ? qualifying : split.dropped).push_back(id);
  }

  std::mt19937_64 rng(seed);
  for (std::size_t i = qualifying.size(); i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(qualifying[i - 1], qualifying[pick(rng)]);
  }
  const auto sizes = Apportion(qualifying.size(), rv);
  if (std::find(sizes.begin(), sizes.end(), 0) != sizes.end()) {
    throw Error(ErrorKind::kTooFewClasses,
                std::to_string(qualifying.size()) + " qualifying classes (min_per_class=" +
                    std::to_string(min_per_class) + ") cannot fill train/val/test at ratios " +
                    FormatRatios(ratios));
  }
  auto it = qualifying.begin();
  split.train_classes.assign(it, it + sizes[0]);
  it += sizes[0];
  split.val_classes.assign(it, it + sizes[1]);
  it += sizes[1];
  split.test_classes.assign(it, it + sizes[2]);
  return split;
}

void WriteSplitFile(const std::string& path, const FewShotSplit& split) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write split file " + path);
  out << "# seed=" << split.seed << " ratios=" << FormatRatios(split.ratios)
      << " min_per_class=" << split.min_per_class << "\n";
  if (!split.dropped.empty()) {
    out << "# dropped=";
    for (std::size_t i = 0; i < split.dropped.size(); ++i) out << (i ? "," : "") << split.dropped[i];
    out << "\n";
  }
  auto section = [&](const char* name, const std::vector<std::string>& ids) {
    out << "[" << name << "]\n";
    for (const auto& id : ids) out << id << "\n";
  };
  section("train", split.train_classes);
  section("val", split.val_classes);
  section("test", split.test_classes);
  if (!out) throw Error(ErrorKind::kIo, "failed writing split file " + path);
}

FewShotSplit ReadSplitFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open split file " + path);
  FewShotSplit split;
  std::vector<std::string>* target = nullptr;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string kv;
      while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
        if (key == "seed") split.seed = std::stoull(value);
        if (key == "ratios") split.ratios = ParseRatios(value);
        if (key == "min_per_class") split.min_per_class = std::stoul(value);
        if (key == "dropped") {
          std::stringstream ds(value);
          std::string id;
          while (std::getline(ds, id, ',')) split.dropped.push_back(id);
        }
      }
      continue;
    }
    if (line == "[train]") {
      target = &split.train_classes;
    } else if (line == "[val]") {
      target = &split.val_classes;
    } else if (line == "[test]") {
      target = &split.test_classes;
    } else if (target == nullptr) {
      throw Error(ErrorKind::kParse,
                  path + ":" + std::to_string(line_no) + ": class before any section", line_no);
    } else {
      target->push_back(line);
    }
  }
  return split;
}

}  // namespace protoaudio::datasetkit
