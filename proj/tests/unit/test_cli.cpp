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

// Drives the built protoaudio binary end to end.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "cli/run_config.hpp"
#include "doctest.h"
#include "json.hpp"
#include "protoaudio/datasetkit/manifest.hpp"
#include "protoaudio/datasetkit/synthetic.hpp"
#include "protoaudio/diff/checkpoint.hpp"
#include "protoaudio/dsp_frontend.hpp"
#include "protoaudio/error.hpp"
#include "test_util.hpp"

#ifndef PROTOAUDIO_CLI_PATH
#error "PROTOAUDIO_CLI_PATH must name the protoaudio binary"
#endif

namespace protoaudio {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string output;  // stdout and stderr interleaved
};

Result Run(const std::string& args) {
  const std::string cmd = std::string(PROTOAUDIO_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof(buf), pipe) != nullptr) r.output += buf;
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void WriteFile(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Tiny episode shape so a full train run takes a second or two.
std::string TinyConfig(const std::string& manifest) {
  return "encoder = vgg\nscale = desk\nmanifest = " + manifest +
         "\nn_shot = 1\nk_way = 2\nq_query = 1\nmax_episodes = 6\neval_interval = 2\n"
         "patience_checks = 5\nlr = 0.001\nval_episodes = 5\nseed = 3\n";
}

TEST_CASE("run config parse, format and validation") {
  std::istringstream in("# comment\nencoder = lstm\nlr = 0.5 # trailing\nmanifest = data/m.tsv\nseed=7\n");
  auto cfg = cli::ParseRunConfig(in, "/base");
  CHECK(cfg.encoder == encoders::EncoderKind::kLstm);
  CHECK(cfg.train.lr == 0.5);
  CHECK(cfg.train.seed == 7);
  CHECK(cfg.manifest == fs::path("/base/data/m.tsv"));
  CHECK(cfg.effective_min_per_class() == 10);

  std::istringstream again(cli::FormatRunConfig(cfg));
  const auto back = cli::ParseRunConfig(again, "/elsewhere");
  CHECK(cli::FormatRunConfig(back) == cli::FormatRunConfig(cfg));

  auto fails_at = [](const std::string& text) {
    std::istringstream s(text);
    try {
      cli::ParseRunConfig(s, "/");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kConfig);
      return e.line();
    }
    return -1;
  };
  CHECK(fails_at("seed = 1\nbogus = 2\n") == 2);
  CHECK(fails_at("\n\nlr = fast\n") == 3);
  CHECK(fails_at("encoder = resnet\n") == 1);
  CHECK(fails_at("seed = 1\nseed = 2\n") == 2);
  CHECK(fails_at("no equals sign\n") == 1);

  cli::RunConfig bad;
  bad.frontend.n_mels = 40;
  CHECK_THROWS_AS(bad.Validate(), Error);
  bad.encoder = encoders::EncoderKind::kSincNet;  // waveform input ignores the frontend
  CHECK_NOTHROW(bad.Validate());
}

TEST_CASE("seed override from the environment") {
  cli::RunConfig cfg;
  cfg.train.seed = 1;
  ::setenv(cli::kSeedEnvVar, "99", 1);
  CHECK(cli::ApplySeedOverride(cfg));
  CHECK(cfg.train.seed == 99);
  ::setenv(cli::kSeedEnvVar, "x", 1);
  CHECK_THROWS_AS(cli::ApplySeedOverride(cfg), Error);
  ::unsetenv(cli::kSeedEnvVar);
  CHECK_FALSE(cli::ApplySeedOverride(cfg));
}

TEST_CASE("synth writes the corpus") {
  testing::TempDir dir;
  const auto r = Run("synth --out " + dir.file("c") + " --classes 15 --per-class 20 --seed 2");
  CHECK(r.code == 0);
  std::size_t wavs = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path() / "c")) wavs += e.path().extension() == ".wav";
  CHECK(wavs == 300);
  const auto m = datasetkit::LoadManifest(dir.file("c/manifest.tsv"));
  CHECK(m.size() == 300);
  CHECK(m.classes().size() == 15);
  CHECK(m.single_label());
}

TEST_CASE("features dumps a 98 x 64 log-mel matrix for one second") {
  testing::TempDir dir;
  Waveform w;
  w.samples.assign(16000, 0.0f);
  for (std::size_t i = 0; i < w.samples.size(); ++i) w.samples[i] = 0.3f * std::sin(0.2f * static_cast<float>(i));
  WriteWav(dir.file("tone.wav"), w);
  const auto r = Run("features --in " + dir.file("tone.wav") + " --out " + dir.file("tone.lmel"));
  CHECK(r.code == 0);
  const std::string bytes = Slurp(dir.path() / "tone.lmel");
  REQUIRE(bytes.size() == 16 + 98 * 64 * 4);
  CHECK(bytes.substr(0, 4) == "LMEL");
  const auto f = ReadFeatureDump(dir.file("tone.lmel"));
  CHECK(f.frames == 98);
  CHECK(f.n_mels == 64);

  CHECK(Run("features --in " + dir.file("missing.wav") + " --out " + dir.file("x")).code == 3);
}

TEST_CASE("subset solves the worked instance") {
  testing::TempDir dir;
  WriteFile(dir.path() / "m.tsv", "a.wav\tA\nb.wav\tB\nc.wav\tA,B\nd.wav\tC\n");
  const auto r = Run("subset --manifest " + dir.file("m.tsv") + " --classes 2 --out " + dir.file("s.tsv"));
  CHECK(r.code == 0);
  CHECK(r.output.find("J=3") != std::string::npos);
  CHECK(r.output.find("classes: A C") != std::string::npos);
  CHECK(Slurp(dir.path() / "s.tsv") == "a.wav\tA\nc.wav\tA\nd.wav\tC\n");
  CHECK(Run("subset --manifest " + dir.file("m.tsv") + " --classes 4").code == 3);
}

TEST_CASE("train and eval produce a complete, reproducible run directory") {
  testing::TempDir dir;
  datasetkit::GenSyntheticCorpus(dir.file("corpus"), 10, 4, 11);
  WriteFile(dir.path() / "tiny.cfg", TinyConfig("corpus/manifest.tsv"));

  const auto a = Run("train --config " + dir.file("tiny.cfg") + " --out " + dir.file("run_a"));
  INFO(a.output);
  REQUIRE(a.code == 0);
  for (const char* f : {"config.cfg", "splits.txt", "metrics.jsonl", "best.ckpt", "last.ckpt"}) {
    CHECK(fs::exists(dir.path() / "run_a" / f));
  }
  const auto b = Run("train --config " + dir.file("tiny.cfg") + " --out " + dir.file("run_b"));
  REQUIRE(b.code == 0);
  CHECK(Slurp(dir.path() / "run_a/metrics.jsonl") == Slurp(dir.path() / "run_b/metrics.jsonl"));

  // The best checkpoint records the maximum validation accuracy in the history.
  double best = -1.0;
  std::size_t lines = 0;
  std::istringstream hist(Slurp(dir.path() / "run_a/metrics.jsonl"));
  for (std::string line; std::getline(hist, line); ++lines) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["timestamp"].is_null());
    if (!j["val_accuracy"].is_null()) best = std::max(best, j["val_accuracy"].get<double>());
  }
  CHECK(lines == 6);
  const auto ckpt = diff::LoadCheckpoint(dir.file("run_a/best.ckpt"));
  CHECK(std::stod(ckpt.header.at("val_accuracy")) == best);

  const auto e1 = Run("eval --run " + dir.file("run_a"));
  INFO(e1.output);
  REQUIRE(e1.code == 0);
  CHECK(e1.output.find("1-shot 2-way") != std::string::npos);
  const std::string report = Slurp(dir.path() / "run_a/eval_test.json");
  CHECK(nlohmann::json::parse(report)["episodes"] == 1000);
  CHECK(Run("eval --run " + dir.file("run_a")).code == 0);
  CHECK(Slurp(dir.path() / "run_a/eval_test.json") == report);

  const auto oracle = Run("eval --run " + dir.file("run_a") + " --embedder oracle --episodes 50");
  CHECK(oracle.code == 0);
  CHECK(oracle.output.find("100.0%") != std::string::npos);

  // A config that disagrees with the checkpoint is rejected.
  std::string cfg = Slurp(dir.path() / "run_a/config.cfg");
  cfg.replace(cfg.find("encoder = vgg"), 13, "encoder = lstm");
  WriteFile(dir.path() / "run_a/config.cfg", cfg);
  const auto mismatch = Run("eval --run " + dir.file("run_a"));
  CHECK(mismatch.code != 0);
  CHECK(mismatch.output.find("CheckpointMismatch") != std::string::npos);
}

TEST_CASE("train reports bad inputs with exit codes") {
  testing::TempDir dir;
  WriteFile(dir.path() / "tiny.cfg", TinyConfig("nowhere/manifest.tsv"));
  const auto missing = Run("train --config " + dir.file("tiny.cfg") + " --out " + dir.file("run"));
  CHECK(missing.code == 3);
  CHECK(missing.output.find("nowhere/manifest.tsv") != std::string::npos);
  CHECK_FALSE(fs::exists(dir.path() / "run"));

  WriteFile(dir.path() / "bad.cfg", "encoder = vgg\nlearning_rate = 1\n");
  const auto bad = Run("train --config " + dir.file("bad.cfg") + " --out " + dir.file("run"));
  CHECK(bad.code == 2);
  CHECK(bad.output.find("learning_rate") != std::string::npos);

  CHECK(Run("eval --run " + dir.file("no_such_run")).code == 3);
  CHECK(Run("").code == 2);
}

TEST_CASE("PROTOAUDIO_SEED overrides the config seed") {
  testing::TempDir dir;
  datasetkit::GenSyntheticCorpus(dir.file("corpus"), 10, 4, 11);
  WriteFile(dir.path() / "tiny.cfg", TinyConfig("corpus/manifest.tsv"));
  REQUIRE(Run("train --config " + dir.file("tiny.cfg") + " --out " + dir.file("run")).code == 0);
  ::setenv(cli::kSeedEnvVar, "1234", 1);
  const auto s = Run("train --config " + dir.file("tiny.cfg") + " --out " + dir.file("run_env"));
  ::unsetenv(cli::kSeedEnvVar);
  REQUIRE(s.code == 0);
  CHECK(Slurp(dir.path() / "run_env/config.cfg").find("seed = 1234\n") != std::string::npos);
  CHECK(Slurp(dir.path() / "run_env/metrics.jsonl") != Slurp(dir.path() / "run/metrics.jsonl"));
}

}  // namespace
}  // namespace protoaudio
