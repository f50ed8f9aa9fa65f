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

#include "cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <vector>

#include "protoaudio/error.hpp"

namespace protoaudio::cli {
namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void Fail(int line, const std::string& msg) {
  throw Error(ErrorKind::kConfig, line > 0 ? "line " + std::to_string(line) + ": " + msg : msg, line);
}

// Re-raises a nested ConfigError with the line attached.
template <typename Fn>
void AtLine(int line, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    const std::string what = e.what();
    Fail(line, what.substr(what.find(": ") + 2));
  }
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& v, int line) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    Fail(line, "bad value '" + v + "' for " + key);
  }
  return out;
}

bool ParseBool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  Fail(line, "bad boolean '" + v + "' for " + key);
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Key {
  const char* name;
  std::function<void(RunConfig&, const std::string&, const std::filesystem::path&, int)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T, typename Field>
Key SizeKey(const char* name, Field field) {
  return {name,
          [name, field](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
            field(c) = static_cast<T>(ParseNumber<T>(name, v, line));
          },
          [field](const RunConfig& c) { return std::to_string(field(const_cast<RunConfig&>(c))); }};
}

template <typename Field>
Key DoubleKey(const char* name, Field field) {
  return {name,
          [name, field](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
            field(c) = ParseNumber<double>(name, v, line);
          },
          [field](const RunConfig& c) { return FormatDouble(field(const_cast<RunConfig&>(c))); }};
}

template <typename Field>
Key PathKey(const char* name, Field field) {
  return {name,
          [field](RunConfig& c, const std::string& v, const std::filesystem::path& base, int) {
            field(c) = v.empty() ? std::filesystem::path() : (base / v).lexically_normal();
          },
          [field](const RunConfig& c) { return field(const_cast<RunConfig&>(c)).string(); }};
}

const std::vector<Key>& Keys() {
  static const std::vector<Key> keys = {
      {"encoder",
       [](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
         AtLine(line, [&] { c.encoder = encoders::ParseEncoderKind(v); });
       },
       [](const RunConfig& c) { return std::string(encoders::EncoderKindName(c.encoder)); }},
      {"scale",
       [](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
         AtLine(line, [&] { c.scale = encoders::ParseScale(v); });
       },
       [](const RunConfig& c) { return std::string(encoders::ScaleName(c.scale)); }},
      PathKey("manifest", [](RunConfig& c) -> auto& { return c.manifest; }),
      PathKey("splits", [](RunConfig& c) -> auto& { return c.splits; }),
      {"split_ratios",
       [](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
         AtLine(line, [&] { c.split_ratios = datasetkit::ParseRatios(v); });
       },
       [](const RunConfig& c) { return datasetkit::FormatRatios(c.split_ratios); }},
      SizeKey<std::size_t>("min_per_class", [](RunConfig& c) -> auto& { return c.min_per_class; }),
      {"record_timestamps",
       [](RunConfig& c, const std::string& v, const std::filesystem::path&, int line) {
         c.record_timestamps = ParseBool("record_timestamps", v, line);
       },
       [](const RunConfig& c) { return std::string(c.record_timestamps ? "true" : "false"); }},
      SizeKey<std::size_t>("n_shot", [](RunConfig& c) -> auto& { return c.train.n_shot; }),
      SizeKey<std::size_t>("k_way", [](RunConfig& c) -> auto& { return c.train.k_way; }),
      SizeKey<std::size_t>("q_query", [](RunConfig& c) -> auto& { return c.train.q_query; }),
      SizeKey<std::size_t>("max_episodes", [](RunConfig& c) -> auto& { return c.train.max_episodes; }),
      SizeKey<std::size_t>("eval_interval", [](RunConfig& c) -> auto& { return c.train.eval_interval; }),
      SizeKey<std::size_t>("patience_checks", [](RunConfig& c) -> auto& { return c.train.patience_checks; }),
      DoubleKey("lr", [](RunConfig& c) -> auto& { return c.train.lr; }),
      SizeKey<std::size_t>("val_episodes", [](RunConfig& c) -> auto& { return c.train.val_episodes; }),
      SizeKey<std::size_t>("test_episodes", [](RunConfig& c) -> auto& { return c.train.test_episodes; }),
      SizeKey<std::uint64_t>("seed", [](RunConfig& c) -> auto& { return c.train.seed; }),
      SizeKey<int>("frontend.frame_len_samples", [](RunConfig& c) -> auto& { return c.frontend.frame_len_samples; }),
      SizeKey<int>("frontend.hop_samples", [](RunConfig& c) -> auto& { return c.frontend.hop_samples; }),
      SizeKey<int>("frontend.fft_size", [](RunConfig& c) -> auto& { return c.frontend.fft_size; }),
      SizeKey<int>("frontend.n_mels", [](RunConfig& c) -> auto& { return c.frontend.n_mels; }),
      DoubleKey("frontend.fmin_hz", [](RunConfig& c) -> auto& { return c.frontend.fmin_hz; }),
      DoubleKey("frontend.fmax_hz", [](RunConfig& c) -> auto& { return c.frontend.fmax_hz; }),
      DoubleKey("frontend.log_floor", [](RunConfig& c) -> auto& { return c.frontend.log_floor; }),
  };
  return keys;
}

}  // namespace

void RunConfig::Validate() const {
  train.Validate();
  frontend.Validate();
  const double sum = split_ratios.train + split_ratios.val + split_ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::kConfig, "split_ratios must sum to 1");
  const auto spec = encoder_spec();
  if (!spec.uses_waveform() && static_cast<std::size_t>(frontend.n_mels) != spec.dims.n_mels) {
    throw Error(ErrorKind::kConfig, "frontend.n_mels=" + std::to_string(frontend.n_mels) +
                                        " but encoder expects " + std::to_string(spec.dims.n_mels));
  }
}

RunConfig ParseRunConfig(std::istream& in, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = Trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) Fail(line, "expected key = value");
    const std::string key = Trim(text.substr(0, eq));
    const std::string value = Trim(text.substr(eq + 1));
    const Key* match = nullptr;
    for (const auto& k : Keys()) {
      if (key == k.name) match = &k;
    }
    if (!match) Fail(line, "unknown key '" + key + "'");
    if (!seen.insert(key).second) Fail(line, "duplicate key '" + key + "'");
    match->set(cfg, value, base_dir, line);
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kNotFound, "cannot open config " + path);
  const auto base = std::filesystem::absolute(std::filesystem::path(path)).parent_path();
  return ParseRunConfig(in, base);
}

bool ApplySeedOverride(RunConfig& cfg) {
  const char* env = std::getenv(kSeedEnvVar);
  if (env == nullptr || *env == '\0') return false;
  cfg.train.seed = ParseNumber<std::uint64_t>(kSeedEnvVar, env, 0);
  return true;
}

std::string FormatRunConfig(const RunConfig& cfg) {
  std::ostringstream out;
  for (const auto& k : Keys()) out << k.name << " = " << k.get(cfg) << "\n";
  return out.str();
}

}  // namespace protoaudio::cli
