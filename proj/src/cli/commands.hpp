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

// Subcommand bodies for the protoaudio tool. Each throws protoaudio::Error;
// the entry point maps error kinds to exit codes.
//
// Run directory layout written by `train` and read by `eval`:
//   config.cfg        canonical config snapshot (absolute paths)
//   splits.txt        class split with provenance header
//   metrics.jsonl     one record per training episode
//   best.ckpt         parameters at the best validation check
//   last.ckpt         parameters after the final episode
//   eval_<split>.txt  report table; eval_<split>.json the same numbers

#ifndef PROTOAUDIO_CLI_COMMANDS_HPP_
#define PROTOAUDIO_CLI_COMMANDS_HPP_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace protoaudio::cli {

struct TrainArgs {
  std::string config;
  std::string out;
  std::string manifest;  // overrides the config when non-empty
};

struct EvalArgs {
  std::string run;
  std::string split = "test";
  std::size_t episodes = 1000;
  std::optional<std::uint64_t> seed;  // defaults to the run seed
  std::vector<std::size_t> shots;     // defaults to the run's n_shot
  std::vector<std::size_t> ways;      // defaults to the run's k_way
  std::string embedder = "checkpoint";  // checkpoint | oracle | constant
};

struct FeaturesArgs {
  std::string in;
  std::string out;
  std::string config;  // optional; supplies frontend.* keys
};

struct SubsetArgs {
  std::string manifest;
  std::size_t classes = 0;
  std::size_t budget = 0;  // 0: library default
  std::string out;         // optional filtered manifest
};

struct SynthArgs {
  std::string out;
  std::size_t classes = 15;
  std::size_t per_class = 20;
  std::uint64_t seed = 0;
};

void RunTrain(const TrainArgs& args, std::ostream& log);
void RunEval(const EvalArgs& args, std::ostream& log);
void RunFeatures(const FeaturesArgs& args, std::ostream& log);
void RunSubset(const SubsetArgs& args, std::ostream& log);
void RunSynth(const SynthArgs& args, std::ostream& log);

}  // namespace protoaudio::cli

#endif  // PROTOAUDIO_CLI_COMMANDS_HPP_
